# -*- coding: utf-8 -*-
import io

import pandas as pd
import pytest

from main import EXIT_ERROR, main, parse_distances


def _frame(text):
    return pd.read_csv(io.StringIO(text), comment='#')


class TestParseDistances:
    def test_range_includes_stop(self):
        assert parse_distances('0:20:5') == [0.0, 5.0, 10.0, 15.0, 20.0]

    def test_list(self):
        assert parse_distances('10, 25,50') == [10.0, 25.0, 50.0]


class TestCommands:
    def test_keyrate_asymptotic(self, capsys):
        assert main(['keyrate', '--mode', 'asymptotic', '--eps', '0.022']) == 0
        frame = _frame(capsys.readouterr().out)
        assert frame['mode'].iloc[0] == 'asymptotic'
        assert frame['R_bps'].iloc[0] == pytest.approx(7.04e6, rel=0.1)

    def test_keyrate_finite_to_file(self, tmp_path):
        out = tmp_path / 'taxa.csv'
        assert main(['keyrate', '--out', str(out)]) == 0
        frame = _frame(out.read_text(encoding='utf-8'))
        assert frame['mode'].iloc[0] == 'finite'
        assert frame['R_bps'].iloc[0] == pytest.approx(1.84e6, rel=0.15)

    def test_repeated_output_is_identical(self, capsys):
        args = ['sweep', '--distances', '0:50:10', '--both', '--seed', '5']
        main(args)
        first = capsys.readouterr().out
        main(args)
        assert capsys.readouterr().out == first
        assert first.splitlines()[2] == '# seed=5'

    def test_threshold_command(self, capsys):
        assert main(['threshold', '--distances', '10,25', '--mode', 'asymptotic']) == 0
        frame = _frame(capsys.readouterr().out)
        assert list(frame.columns) == ['distance_km', 'T', 'eps_threshold']
        assert frame['eps_threshold'].is_monotonic_decreasing

    def test_unknown_key_exits_with_error(self, capsys):
        assert main(['keyrate', '--set', 'channel.lenght_km = 3']) == EXIT_ERROR
        assert capsys.readouterr().out == ''

    def test_missing_config_file(self, tmp_path):
        assert main(['keyrate', '--config', str(tmp_path / 'nada.cfg')]) == EXIT_ERROR
