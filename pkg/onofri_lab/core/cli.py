"""
Модуль для парсингу аргументів командного рядка.
"""

import argparse

from .utils import print_error, print_warning

COMMANDS = ("quad-check", "bubble-report", "config-search", "branch", "minimize", "mto-sample")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Очікується список чисел через кому, отримано: {text}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Очікується список цілих через кому, отримано: {text}")


def _name_list(text: str) -> list[str]:
    return [x.strip().upper() for x in text.split(",") if x.strip()]


def _common_parser() -> argparse.ArgumentParser:
    """Прапорці, спільні для всіх команд."""
    common = argparse.ArgumentParser(add_help=False)

    config_group = common.add_argument_group('Конфігурація')
    config_group.add_argument(
        '--config',
        type=str,
        metavar='PATH',
        help='Файл конфігурації (JSON або YAML); за замовчуванням config.yaml'
    )
    config_group.add_argument(
        '--profile',
        type=str,
        metavar='NAME',
        help='Використати збережений профіль з profiles/'
    )

    output_group = common.add_argument_group('Вивід')
    output_group.add_argument(
        '--out',
        type=str,
        metavar='PATH',
        help='Файл результату (за замовчуванням stdout)'
    )
    output_group.add_argument(
        '--format',
        type=str,
        choices=['csv', 'json'],
        help='Формат результату'
    )

    misc_group = common.add_argument_group('Додаткові опції')
    misc_group.add_argument(
        '--threads',
        type=int,
        metavar='N',
        help='Кількість потоків (0 = авто)'
    )
    misc_group.add_argument(
        '--debug',
        action='store_true',
        help='Увімкнути режим налагодження'
    )
    misc_group.add_argument(
        '--ascii-logs',
        action='store_true',
        help='ASCII-іконки в логах'
    )
    return common


def parse_arguments(argv: "list[str] | None" = None) -> argparse.Namespace:
    """
    Парсинг аргументів командного рядка.

    Args:
        argv: Список аргументів (без імені програми). Якщо None: читає з sys.argv.

    Returns:
        argparse.Namespace: Об'єкт з розпарсеними аргументами
    """
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="onofri",
        description="Onofri Lab - чисельні експерименти з нерівністю Мозера–Трудінгера–Онофрі на сфері",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Приклади використання:
  # Перевірка точності квадратури
  python onofri.py quad-check --L 32

  # Асимптотика бульбашок для трикутника
  python onofri.py bubble-report --configs TRIANGLE --eps 1e-2,1e-3

  # Пошук конфігурацій
  python onofri.py config-search --N 3,4 --starts 50

  # Гілка розв'язків рівняння середнього поля
  python onofri.py branch --a-start 0.34 --a-end 0.48 --out branch.csv

  # Мінімізація з обмеженням
  python onofri.py minimize --a 0.49 --c0 0.5 --seeds 10

  # Використання профілю
  python onofri.py bubble-report --profile quick
        """
    )
    parser.add_argument(
        '--list-profiles',
        action='store_true',
        help='Показати список доступних профілів'
    )
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')

    quad = sub.add_parser('quad-check', parents=[common], help='Точність квадратури на мономах')
    quad.add_argument('--L', type=int, metavar='L', help='Порядок сітки Гаусса–Лежандра')
    quad.add_argument('--max-degree', type=int, metavar='D', help='Максимальний степінь мономів')

    bubbles = sub.add_parser('bubble-report', parents=[common], help='Асимптотика бульбашок')
    bubble_group = bubbles.add_argument_group('Бульбашки')
    bubble_group.add_argument('--configs', type=_name_list, metavar='LIST',
                              help='PAIR,TRIANGLE,TETRAHEDRON,OCTAHEDRON')
    bubble_group.add_argument('--eps', type=_float_list, metavar='LIST', help='Сходинки ε через кому')
    bubble_group.add_argument('--delta', type=float, metavar='δ', help='Радіус шапки δ')
    bubble_group.add_argument('--L', type=int, metavar='L', help='Порядок глобальної сітки')
    bubble_group.add_argument('--n-r', type=int, metavar='N', help='Радіальних вузлів у шапці')
    bubble_group.add_argument('--n-ang', type=int, metavar='N', help='Кутових вузлів у шапці')

    search = sub.add_parser('config-search', parents=[common], help='inf ‖Λ∞‖² за N-атомними мірами')
    search_group = search.add_argument_group('Пошук')
    search_group.add_argument('--N', type=_int_list, metavar='LIST', help='Кількість атомів (через кому)')
    search_group.add_argument('--even', action='store_true', help='Симетрія ±p')
    search_group.add_argument('--starts', type=int, metavar='K', help='Кількість випадкових стартів')
    search_group.add_argument('--seed', type=int, metavar='S', help='Зерно генератора')

    branch = sub.add_parser('branch', parents=[common], help='Гілка розв\'язків −aΔu + 1 = e^{2u}')
    branch_group = branch.add_argument_group('Продовження')
    branch_group.add_argument('--a-start', type=float, metavar='A', help='Початкове a')
    branch_group.add_argument('--a-end', type=float, metavar='A', help='Кінцеве a')
    branch_group.add_argument('--step', type=float, metavar='H', help='Крок по a')
    branch_group.add_argument('--no-switch', action='store_true', help='Лише тривіальна гілка')
    branch_group.add_argument('--lmax', type=int, metavar='L', help='Степінь колокації')
    branch_group.add_argument('--targets', type=_float_list, metavar='LIST', help='Точні значення a')

    minimize = sub.add_parser('minimize', parents=[common], help='Мінімізація J_a з обмеженням ‖Λ‖² ≤ c0')
    min_group = minimize.add_argument_group('Мінімізація')
    min_group.add_argument('--a', type=float, metavar='A', help='Параметр a ∈ (1/3, 1)')
    min_group.add_argument('--c0', type=float, metavar='C', help='Межа ‖Λ‖² ≤ c0 < 2/3')
    min_group.add_argument('--mode', type=str, choices=['backtrack', 'penalty'], help='Обробка обмеження Λ')
    min_group.add_argument('--penalty-weight', type=float, metavar='W', help='Вага штрафу')
    min_group.add_argument('--seeds', type=int, metavar='K', help='Кількість запусків')
    min_group.add_argument('--seed', type=int, metavar='S', help='Перше зерно')
    min_group.add_argument('--lmax', type=int, metavar='L', help='Степінь профілю')
    min_group.add_argument('--amplitude', type=float, metavar='A', help='Амплітуда початкових профілів')
    min_group.add_argument('--max-iter', type=int, metavar='N', help='Максимум ітерацій')
    min_group.add_argument('--tol', type=float, metavar='T', help='Поріг ‖∇J‖')

    sample = sub.add_parser('mto-sample', parents=[common], help='Нерівності на випадкових полях')
    sample_group = sample.add_argument_group('Семплінг')
    sample_group.add_argument('--count', type=int, metavar='K', help='Кількість полів')
    sample_group.add_argument('--lmax', type=int, metavar='L', help='Спектральна межа полів')
    sample_group.add_argument('--amplitude', type=float, metavar='A', help='Амплітуда коефіцієнтів')
    sample_group.add_argument('--seed', type=int, metavar='S', help='Зерно генератора')
    sample_group.add_argument('--L', type=int, metavar='L', help='Порядок сітки')
    sample_group.add_argument('--dump-worst', type=str, metavar='PATH',
                              help='Зберегти поле з найменшою щілиною (.csv або .parquet)')
    lemma_group = sample.add_argument_group('Нижня межа ½avg|∇u|² + 2ū')
    lemma_group.add_argument('--lemma', action='store_true', help='Запустити семплер нижньої межі')
    lemma_group.add_argument('--K1', type=float, metavar='K', help='Межа H¹-норми')
    lemma_group.add_argument('--K2', type=float, metavar='K', help='Нижня межа ‖Λ‖²')
    lemma_group.add_argument('--lemma-count', type=int, metavar='K', help='Кількість профілів')

    return parser.parse_args(argv)


def _positive(args: argparse.Namespace, name: str, flag: str, allow_zero: bool = False) -> bool:
    value = getattr(args, name, None)
    if value is None:
        return True
    if value < 0 or (value == 0 and not allow_zero):
        bound = "не менше 0" if allow_zero else "більше 0"
        print_error(f"Значення {flag} має бути {bound}, отримано: {value}")
        return False
    return True


def validate_arguments(args: argparse.Namespace) -> bool:
    """
    Валідація аргументів командного рядка.

    Args:
        args: Розпарсені аргументи

    Returns:
        bool: True якщо валідація пройшла успішно
    """
    if args.command is None:
        if args.list_profiles:
            return True
        print_error("Не вказано команду")
        print_warning(f"Доступні команди: {', '.join(COMMANDS)}")
        return False

    checks = [
        ("L", "--L", False),
        ("max_degree", "--max-degree", True),
        ("n_r", "--n-r", False),
        ("n_ang", "--n-ang", False),
        ("delta", "--delta", False),
        ("starts", "--starts", False),
        ("step", "--step", False),
        ("lmax", "--lmax", False),
        ("seeds", "--seeds", False),
        ("max_iter", "--max-iter", True),
        ("tol", "--tol", False),
        ("count", "--count", False),
        ("K1", "--K1", False),
        ("K2", "--K2", False),
        ("lemma_count", "--lemma-count", False),
        ("threads", "--threads", True),
        ("penalty_weight", "--penalty-weight", False),
    ]
    for name, flag, allow_zero in checks:
        if not _positive(args, name, flag, allow_zero):
            return False

    eps = getattr(args, "eps", None)
    if eps is not None and (not eps or any(e <= 0 for e in eps)):
        print_error(f"Значення --eps мають бути додатними, отримано: {eps}")
        return False

    N = getattr(args, "N", None)
    if N is not None and not N:
        print_error("Список --N порожній")
        return False

    for name, flag in (("a_start", "--a-start"), ("a_end", "--a-end")):
        value = getattr(args, name, None)
        if value is not None and not (0.3 < value < 1.0):
            print_error(f"Значення {flag} має лежати в (0.3, 1), отримано: {value}")
            return False

    a = getattr(args, "a", None)
    if a is not None and not (1.0 / 3.0 < a < 1.0):
        print_error(f"Значення --a має лежати в (1/3, 1), отримано: {a}")
        return False

    c0 = getattr(args, "c0", None)
    if c0 is not None and not (0.0 < c0 < 2.0 / 3.0):
        print_error(f"Значення --c0 має лежати в (0, 2/3), отримано: {c0}")
        return False

    return True
