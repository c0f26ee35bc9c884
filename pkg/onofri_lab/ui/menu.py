"""Головне меню консольного UI."""
from __future__ import annotations

import os
from pathlib import Path

from InquirerPy import inquirer
from InquirerPy.base.control import Choice
from InquirerPy.separator import Separator
from prompt_toolkit.validation import ValidationError, Validator
from rich.panel import Panel
from rich.text import Text

from . import console, show_summary


# ─── Validators ──────────────────────────────────────────────────────────────

class FloatListValidator(Validator):
    """Одне або кілька додатних чисел через кому."""

    def validate(self, document):
        text = document.text.strip()
        try:
            values = [float(x) for x in text.split(",") if x.strip()]
        except ValueError:
            values = []
        if not values or any(v <= 0 for v in values):
            raise ValidationError(
                message="Введіть додатні числа через кому (наприклад 1e-2,1e-3)",
                cursor_position=len(text),
            )


class NonEmptyValidator(Validator):
    def validate(self, document):
        if not document.text.strip():
            raise ValidationError(message="Значення не може бути порожнім", cursor_position=0)


class PositiveIntValidator(Validator):
    def validate(self, document):
        text = document.text.strip()
        if not text.isdigit() or int(text) < 1:
            raise ValidationError(
                message="Введіть ціле число ≥ 1",
                cursor_position=len(text),
            )


# ─── Команди та їхні параметри ──────────────────────────────────────────────

COMMAND_CHOICES = [
    Choice(value="quad-check",    name="Точність квадратури"),
    Choice(value="bubble-report", name="Асимптотика бульбашок"),
    Choice(value="config-search", name="Пошук конфігурацій (inf ‖Λ∞‖²)"),
    Choice(value="branch",        name="Гілка розв'язків рівняння середнього поля"),
    Choice(value="minimize",      name="Мінімізація J_a з обмеженням"),
    Choice(value="mto-sample",    name="Нерівності на випадкових полях"),
]

# команда -> [(прапорець, підказка, значення за замовчуванням, валідатор)]
COMMAND_PARAMS: dict[str, list[tuple[str, str, str, type[Validator]]]] = {
    "quad-check": [("--L", "Порядок сітки L:", "32", PositiveIntValidator)],
    "bubble-report": [
        ("--configs", "Конфігурації:", "PAIR,TRIANGLE,TETRAHEDRON,OCTAHEDRON", NonEmptyValidator),
        ("--eps", "Сходинка ε:", "1e-2,3e-3,1e-3", FloatListValidator),
    ],
    "config-search": [
        ("--N", "Кількість атомів N:", "3", PositiveIntValidator),
        ("--starts", "Кількість стартів:", "200", PositiveIntValidator),
    ],
    "branch": [
        ("--a-start", "Початкове a:", "0.34", FloatListValidator),
        ("--a-end", "Кінцеве a:", "0.48", FloatListValidator),
    ],
    "minimize": [
        ("--a", "Параметр a:", "0.49", FloatListValidator),
        ("--c0", "Межа c0:", "0.5", FloatListValidator),
        ("--seeds", "Кількість зерен:", "10", PositiveIntValidator),
    ],
    "mto-sample": [("--count", "Кількість полів:", "1000", PositiveIntValidator)],
}


def build_argv(
    command: str,
    params: dict[str, str],
    profile: str = "",
    out: str = "",
) -> list[str]:
    """Збирає argv для runner.main (argv[0]: ім'я програми)."""
    argv = ["onofri", command]
    for flag, value in params.items():
        value = str(value).strip()
        if value:
            argv.extend([flag, value])
    if profile:
        argv.extend(["--profile", profile])
    if out:
        argv.extend(["--out", out])
    return argv


def _list_profiles() -> list[Choice]:
    """Повертає список профілів для InquirerPy select."""
    profiles_dir = Path(__file__).parent.parent.parent / "profiles"
    choices: list[Choice] = [Choice(value="", name="(без профілю)")]
    if profiles_dir.exists():
        for p in sorted(profiles_dir.glob("*.yaml")):
            choices.append(Choice(value=p.stem, name=p.stem))
    return choices


def _clear_screen() -> None:
    """Очищає консоль (кросплатформенно)."""
    os.system("cls" if os.name == "nt" else "clear")


def _print_header() -> None:
    text = Text()
    text.append("Onofri Lab\n", style="bold cyan")
    text.append("Нерівність Мозера–Трудінгера–Онофрі на сфері", style="dim")
    threads = os.getenv("ONOFRI_LAB_THREADS")
    if threads:
        text.append("  ·  Потоків: ", style="dim")
        text.append(threads, style="cyan")
    console.print(Panel(text, border_style="cyan", padding=(0, 2)))


def run_wizard(command: str) -> int:
    """Питає параметри команди і запускає її через runner.main."""
    console.rule(f"[cyan]{command}[/cyan]")

    profile: str = inquirer.select(
        message="Профіль:",
        choices=_list_profiles(),
        default="",
    ).execute()

    params: dict[str, str] = {}
    # Параметри з профілю не перепитуються
    if not profile:
        for flag, prompt, default, validator in COMMAND_PARAMS.get(command, []):
            params[flag] = inquirer.text(
                message=prompt,
                default=default,
                validate=validator(),
            ).execute()

    out: str = inquirer.text(message="Файл результату (порожньо = stdout):", default="").execute()

    summary = {"Команда": command, "Профіль": profile or "—", "Вивід": out or "stdout"}
    summary.update({flag.lstrip("-"): value for flag, value in params.items()})
    show_summary(summary)

    if not inquirer.confirm(message="Запустити?", default=True).execute():
        return 0

    from ..core.runner import main
    return main(build_argv(command, params, profile, out))


def run() -> None:
    """Запускає цикл головного меню."""
    _clear_screen()
    _print_header()

    while True:
        try:
            action = inquirer.select(
                message="Оберіть дію:",
                choices=[*COMMAND_CHOICES, Separator(), Choice(value="quit", name="Вийти")],
                default="quad-check",
            ).execute()
        except KeyboardInterrupt:
            console.print("\n[dim]До побачення.[/dim]")
            return

        if action == "quit":
            console.print("[dim]До побачення.[/dim]")
            return

        try:
            code = run_wizard(action)
            style = "green" if code == 0 else "red"
            console.print(f"[{style}]Код завершення: {code}[/{style}]")
        except KeyboardInterrupt:
            console.print("\n[yellow]Скасовано.[/yellow]")
        inquirer.confirm(message="Повернутися до меню?", default=True).execute()
        _clear_screen()
        _print_header()
