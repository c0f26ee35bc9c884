import time

from .utils import format_time, print_progress


class TimeTracker:
    """Прогрес і ETA для багатоелементних запусків (сходинки ε, зерна, значення N)."""

    def __init__(self, total_items: int, label: str = ""):
        self.total_items = total_items
        self.label = label
        self.processed_items = 0
        self.start_time = time.time()
        self.elapsed_times: list[float] = []
        self.last_item_end_time = self.start_time

    def update(self, items_processed: int = 1):
        current_time = time.time()
        self.elapsed_times.append(current_time - self.last_item_end_time)
        self.last_item_end_time = current_time
        self.processed_items += items_processed

    def get_elapsed_time(self):
        return time.time() - self.start_time

    def get_remaining_time(self):
        if not self.elapsed_times or self.processed_items == 0:
            return None
        num_items_to_use = min(5, len(self.elapsed_times))
        recent_times = self.elapsed_times[-num_items_to_use:]
        avg_time_per_item = sum(recent_times) / len(recent_times)
        if len(self.elapsed_times) < 5 or self.processed_items < self.total_items * 0.1:
            if len(self.elapsed_times) == 1:
                safety_factor = 1.2
            elif len(self.elapsed_times) < 3:
                safety_factor = 1.1
            else:
                safety_factor = 1.05
            avg_time_per_item *= safety_factor
        remaining_items = max(0, self.total_items - self.processed_items)
        return avg_time_per_item * remaining_items

    def get_percentage_complete(self):
        return (
            (self.processed_items / self.total_items) * 100
            if self.total_items > 0
            else 0
        )

    def get_progress_info(self):
        elapsed = self.get_elapsed_time()
        remaining = self.get_remaining_time()
        percentage = self.get_percentage_complete()

        prefix = f"{self.label}: " if self.label else ""
        info = f"{prefix}Прогрес: {percentage:.1f}% ({self.processed_items}/{self.total_items})"
        info += f" | Минуло: {format_time(elapsed)}"
        if remaining is not None and self.processed_items < self.total_items:
            accuracy_note = ""
            if len(self.elapsed_times) == 1:
                accuracy_note = " (дуже приблизно)"
            elif len(self.elapsed_times) < 3:
                accuracy_note = " (орієнтовно)"
            info += f" | Залишилось: {format_time(remaining)}{accuracy_note}"
        return info

    def report(self):
        print_progress(self.get_progress_info())
