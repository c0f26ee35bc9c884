"""Запуск пакета: `python -m onofri_lab` або через onofri.py."""
from __future__ import annotations

import sys

from dotenv import load_dotenv


def _utf8_stdout() -> None:
    reconfigure = getattr(sys.stdout, "reconfigure", None)
    if reconfigure is None:
        return
    try:
        reconfigure(encoding="utf-8")
    except (OSError, ValueError):
        pass


def launch(argv: list[str] | None = None) -> int:
    """
    Без аргументів відкриває інтерактивне меню, інакше виконує команду CLI.

    argv включає ім'я програми, як sys.argv. Повертає код виходу.
    """
    argv = list(sys.argv) if argv is None else list(argv)
    load_dotenv()
    _utf8_stdout()
    if len(argv) <= 1:
        from .ui.menu import run
        run()
        return 0
    from .core.runner import main
    return main(argv)


if __name__ == "__main__":
    sys.exit(launch())
