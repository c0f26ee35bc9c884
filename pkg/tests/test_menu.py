from onofri_lab.ui.menu import COMMAND_PARAMS, build_argv
from onofri_lab.core.cli import COMMANDS, parse_arguments, validate_arguments


def test_build_argv_skips_empty_values():
    argv = build_argv("quad-check", {"--L": " 16 ", "--max-degree": ""}, profile="quick", out="r.csv")
    assert argv == ["onofri", "quad-check", "--L", "16", "--profile", "quick", "--out", "r.csv"]


def test_every_command_has_wizard_parameters():
    assert set(COMMAND_PARAMS) == set(COMMANDS)


def test_wizard_defaults_form_valid_command_lines():
    for command, params in COMMAND_PARAMS.items():
        argv = build_argv(command, {flag: default for flag, _, default, _ in params})
        assert validate_arguments(parse_arguments(argv[1:]))
