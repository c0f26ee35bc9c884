"""Інтерактивний запуск команд (InquirerPy + rich)."""

from rich.console import Console
from rich.table import Table

# Меню пише у stderr, як і логи: stdout лишається під результати команд
console = Console(stderr=True)


def show_summary(params: dict[str, str], title: str = "Параметри запуску") -> None:
    """Таблиця-підсумок параметрів перед запуском команди."""
    table = Table(title=title, show_header=False, border_style="cyan", box=None, padding=(0, 1))
    table.add_column(style="dim cyan", no_wrap=True)
    table.add_column(style="white")
    for key, value in params.items():
        table.add_row(key, str(value))
    console.print()
    console.print(table)
    console.print()
