import time

import numpy as np
import pandas as pd

from .utils import (
    print_header,
    print_info,
    print_info_detail,
    print_warning,
    print_error,
    print_success,
    print_tech_error,
    format_time,
    init_utils,
)
from .config import AppConfig, build_config
from .errors import ConfigurationError, InfeasibleConfigurationError, OnofriLabError
from .progress import TimeTracker
from .cli import parse_arguments, validate_arguments
from .profiles import load_profile, print_profiles_list
from ..analysis.bubbles import bubble_report, ladder_checks
from ..analysis.concentration import min_lambda_over_configs
from ..analysis.inequalities import random_field_suite
from ..sinks import make_sink
from ..solvers.continuation import continue_branch, near_third_report
from ..solvers.minimizer import ConstraintSpec, minimize, random_profile, sample_lower_bound
from ..sphere.fields import dump_field
from ..sphere.quadrature import quadrature_exactness_suite


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


# ---------------------------------------------------------------------------
# Команди: кожна повертає (результат, чи пройшли перевірки)
# ---------------------------------------------------------------------------

def cmd_quad_check(config: AppConfig) -> tuple[pd.DataFrame, bool]:
    print_header("ТОЧНІСТЬ КВАДРАТУРИ")
    print_info_detail("Налаштування:", {
        "L": config.grid.L,
        "Максимальний степінь": config.grid.max_degree,
    })
    frame = quadrature_exactness_suite(config.grid.L, config.grid.max_degree)
    failed = frame[~frame["passed"]]
    if len(failed):
        print_warning(
            f"Не пройшли {len(failed)} з {len(frame)} мономів, "
            f"найбільша похибка {failed['abs_error'].max():.3e} (степінь {int(failed['degree'].min())}+)"
        )
    else:
        print_success(f"Всі {len(frame)} мономів точні, max похибка {frame['abs_error'].max():.3e}")
    return frame, not len(failed)


def cmd_bubble_report(config: AppConfig) -> tuple[pd.DataFrame, bool]:
    print_header("АСИМПТОТИКА БУЛЬБАШОК")
    configs = config.bubbles.configs
    print_info_detail("Налаштування:", {
        "Конфігурації": ", ".join(configs),
        "Сходинка ε": ", ".join(f"{e:g}" for e in config.bubbles.eps),
        "δ": config.caps.delta,
        "Сітка L": config.grid.L,
        "Шапка": f"{config.caps.n_r} × {config.caps.n_ang}",
    })
    tracker = TimeTracker(len(configs), label="Конфігурації")
    frames = []
    for name in configs:
        frames.append(bubble_report(
            [name],
            config.bubbles.eps,
            delta=config.caps.delta,
            grid_L=config.grid.L,
            n_r=config.caps.n_r,
            n_ang=config.caps.n_ang,
            threads=config.runtime.threads,
        ))
        tracker.update()
        tracker.report()
    frame = pd.concat(frames, ignore_index=True)
    errors = int((frame["error"].fillna("") != "").sum())
    if errors:
        print_warning(f"Рядків з помилками: {errors} з {len(frame)}")
    checks = ladder_checks(frame)
    failing = [row.config for row in checks.itertuples() if not row.passed]
    if failing:
        print_error(f"Асимптотика не виконується: {', '.join(failing)}")
    elif len(checks):
        print_success(f"Асимптотика виконується для {len(checks)} конфігурацій")
    return frame, not failing


def cmd_config_search(config: AppConfig) -> tuple[dict | list, bool]:
    print_header("ПОШУК КОНФІГУРАЦІЙ")
    search = config.search
    print_info_detail("Налаштування:", {
        "N": ", ".join(str(n) for n in search.N),
        "Симетрія ±p": "так" if search.even else "ні",
        "Стартів": search.starts,
        "Зерно": search.seed,
    })
    tracker = TimeTracker(len(search.N), label="N")
    records = []
    for N in search.N:
        result = min_lambda_over_configs(
            N, search.even, starts=search.starts, seed=search.seed, threads=config.runtime.threads,
        )
        print_info(f"N={N}: inf ‖Λ∞‖² = {result.infimum:.12g}, атомів {result.measure.size}")
        records.append(result.to_record())
        tracker.update()
        tracker.report()
    return (records[0] if len(records) == 1 else records), True


def cmd_branch(config: AppConfig) -> tuple[pd.DataFrame, bool]:
    print_header("ГІЛКА РОЗВ'ЯЗКІВ")
    b = config.branch
    print_info_detail("Налаштування:", {
        "a": f"{b.a_start:g} → {b.a_end:g}",
        "Крок": b.step,
        "Відгалуження при 1/3": "так" if b.switch_at_third else "ні",
        "lmax": b.lmax,
        "Цілі": ", ".join(f"{a:g}" for a in b.targets) or "—",
    })
    branch = continue_branch(
        b.a_start, b.a_end, step=b.step, switch_at_third=b.switch_at_third,
        lmax=b.lmax, targets=b.targets,
    )
    frame = branch.to_frame()
    if b.switch_at_third:
        near = near_third_report(branch)
        if len(near):
            closest = near.loc[near["a"].idxmin()]
            print_info_detail("Біля a = 1/3:", {
                "a": float(closest["a"]),
                "profile_corr": float(closest["profile_corr"]),
                "beta_ratio": float(closest["beta_ratio"]),
            })
    unresolved = int((~frame["resolved"].astype(bool)).sum()) if len(frame) else 0
    if unresolved:
        print_warning(f"Нерозв'язаних точок (sup > 6): {unresolved}")
    if branch.failed:
        print_error(f"Гілка обірвана: {branch.failure}")
    else:
        print_success(f"Точок гілки: {len(branch)}")
    return frame, not branch.failed


def cmd_minimize(config: AppConfig) -> tuple[list, bool]:
    print_header("МІНІМІЗАЦІЯ З ОБМЕЖЕННЯМ")
    m = config.minimize
    spec = ConstraintSpec(m.c0, mode=m.mode, weight=m.penalty_weight)
    seeds = [m.seed + i for i in range(m.seeds)]
    print_info_detail("Налаштування:", {
        "a": m.a,
        "c0": m.c0,
        "Режим": m.mode,
        "Зерна": f"{seeds[0]}..{seeds[-1]}" if seeds else "—",
        "lmax": m.lmax,
    })
    tracker = TimeTracker(len(seeds), label="Зерна")
    records = []
    passed = True
    for seed in seeds:
        init = random_profile(np.random.default_rng(seed), m.lmax, amplitude=m.amplitude)
        result = minimize(m.a, spec, init=init, max_iter=m.max_iter, tol=m.tol, lmax=m.lmax, seed=seed)
        records.append(result.to_record())
        ok = result.converged and result.feasible_moments and result.feasible_lambda
        if not ok:
            print_warning(f"Зерно {seed}: не збіглось або порушено допустимість (J = {result.J:.3e})")
        passed = passed and ok
        tracker.update()
        tracker.report()
    if records:
        print_info(f"max |J| = {max(abs(r['J']) for r in records):.3e}")
    return records, passed


def cmd_mto_sample(config: AppConfig) -> tuple[dict, bool]:
    print_header("НЕРІВНОСТІ НА ВИПАДКОВИХ ПОЛЯХ")
    s = config.sample
    print_info_detail("Налаштування:", {
        "Полів": s.count,
        "lmax": s.lmax,
        "Амплітуда": s.amplitude,
        "Зерно": s.seed,
        "Сітка L": config.grid.L,
    })
    suite = random_field_suite(
        count=s.count, lmax=s.lmax, amplitude=s.amplitude, seed=s.seed,
        grid_L=config.grid.L, threads=config.runtime.threads,
    )
    record = suite.to_record()
    passed = suite.passed
    if passed:
        print_success(f"Порушень немає, min щілина Онофрі {record['min_onofri_gap']:.6g}")
    else:
        print_error(f"Порушень: {suite.violations}")

    if s.dump_worst and suite.worst_field is not None:
        path = dump_field(suite.worst_field, s.dump_worst)
        record["dump"] = str(path)
        print_info(f"Найгірше поле збережено: {path}")

    if s.lemma:
        sample = sample_lower_bound(s.K1, s.K2, count=s.lemma_count, seed=s.seed)
        record["lower_bound"] = sample.to_record()
        if sample.positive:
            print_success(f"Емпірична нижня межа {sample.minimum:.6g} > 0 ({sample.accepted} профілів)")
        else:
            print_warning(f"Нижня межа не підтверджена: прийнято {sample.accepted} з {sample.drawn}")
        passed = passed and sample.positive
    return record, passed


COMMAND_HANDLERS = {
    "quad-check": cmd_quad_check,
    "bubble-report": cmd_bubble_report,
    "config-search": cmd_config_search,
    "branch": cmd_branch,
    "minimize": cmd_minimize,
    "mto-sample": cmd_mto_sample,
}


def main(argv: list[str] | None = None) -> int:
    # Парсинг CLI аргументів (argv[1:] якщо передано, інакше sys.argv)
    cli_argv = argv[1:] if argv is not None else None
    try:
        args = parse_arguments(cli_argv)
    except SystemExit as e:
        # argparse: 0 для --help, 2 для помилок
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if not validate_arguments(args):
        return EXIT_USAGE

    if args.list_profiles:
        print_profiles_list()
        return EXIT_OK

    # Завантаження профілю
    profile_config = {}
    if args.profile:
        profile_config = load_profile(args.profile)
        if not profile_config:
            return EXIT_USAGE

    # Побудова єдиного конфігу: defaults -> config file -> env -> profile -> CLI
    try:
        config = build_config(args, profile_config)
    except ConfigurationError as e:
        print_tech_error("Некоректна конфігурація", e)
        return EXIT_USAGE

    init_utils(ascii_logs=config.display.ascii_logs, debug=config.display.debug)

    start_time = time.time()
    try:
        sink = make_sink(config.output_format(args.command), config.output.out)
        result, passed = COMMAND_HANDLERS[args.command](config)
        path = sink.write(result)
    except (ConfigurationError, InfeasibleConfigurationError) as e:
        print_tech_error("Некоректні параметри команди", e)
        return EXIT_USAGE
    except OnofriLabError as e:
        print_tech_error("Помилка обчислення", e)
        return EXIT_FAILED
    except OSError as e:
        print_tech_error("Помилка запису результату", e)
        return EXIT_FAILED

    if path is not None:
        print_info(f"Результат: {path}")
    print_info(f"Час виконання: {format_time(time.time() - start_time)}")
    if not passed:
        print_error("Перевірки не пройдено")
        return EXIT_FAILED
    return EXIT_OK
