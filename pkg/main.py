# -*- coding: utf-8 -*-
"""
Linha de comando do simulador CV-QKD com oscilador local local (LLO)

Subcomandos: simulate, keyrate, sweep, threshold, calibrate
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from loguru import logger

from functions.config import LinkConfig, get_profile, load_config
from functions.errors import CVQKDError
from functions.harness import (calibration_report, compare_modes, run_experiment, sweep_distance,
                               threshold_vs_distance, write_csv)
from functions.logging_setup import configure_logging, setup_encoding
from functions.security import SecurityInputs, secret_key_rate

EXIT_ERROR = 2
DEFAULT_EPS = 0.022


def parse_distances(text: str) -> List[float]:
    """'0:100:5' (início:fim:passo, fim incluído) ou '10,25,50'"""
    if ':' in text:
        start, stop, step = (float(v) for v in text.split(':'))
        return list(np.round(np.arange(start, stop + step / 2, step), 9))
    return [float(v) for v in text.split(',') if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='arquivo chave-valor (secao.chave = valor)')
    common.add_argument('--profile', default='desk', help='perfil base: desk, field ou ideal')
    common.add_argument('--seed', type=int, help='semente raiz (u64)')
    common.add_argument('--out', help='arquivo CSV de saída (padrão: stdout)')
    common.add_argument('--mode', choices=('asymptotic', 'finite'), help='modo da taxa de chave')
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='CHAVE=VALOR',
                        help='sobrescreve uma chave (repetível)')
    common.add_argument('--log-level', default='INFO')
    common.add_argument('--log-file')

    parser = argparse.ArgumentParser(prog='llo-cvqkd', description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest='command', required=True)

    simulate = sub.add_parser('simulate', parents=[common], help='simulação de ponta a ponta por blocos')
    simulate.add_argument('--blocks', type=int)
    simulate.add_argument('--dump-waveforms', metavar='DIR', help='grava as fotocorrentes de cada bloco (.cvqw)')

    keyrate = sub.add_parser('keyrate', parents=[common], help='taxa de chave a partir dos parâmetros')
    keyrate.add_argument('--eps', type=float, default=DEFAULT_EPS, help='ruído em excesso (SNU)')
    keyrate.add_argument('--length', type=float, help='distância em km (padrão: channel.length_km)')

    sweep = sub.add_parser('sweep', parents=[common], help='taxa de chave versus distância')
    sweep.add_argument('--eps', type=float, default=DEFAULT_EPS)
    sweep.add_argument('--distances', default='0:100:5')
    sweep.add_argument('--both', action='store_true', help='assintótico e finito na mesma tabela')

    threshold = sub.add_parser('threshold', parents=[common], help='limiar de ruído em excesso')
    threshold.add_argument('--distances', default='25')

    calibrate = sub.add_parser('calibrate', parents=[common], help='calibração do ruído de disparo')
    calibrate.add_argument('--symbols', type=int)
    return parser


def resolve_config(args) -> LinkConfig:
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f'link.seed = {args.seed}')
    if args.mode:
        overrides.append(f'security.mode = {args.mode}')
    return load_config(args.config, overrides, base=get_profile(args.profile))


def emit(frame: pd.DataFrame, cfg: LinkConfig, out: Optional[str], comments=()) -> None:
    text = write_csv(frame, cfg, out, comments)
    if out is None:
        sys.stdout.write(text)


def run_command(args) -> None:
    cfg = resolve_config(args)

    if args.command == 'simulate':
        report = run_experiment(cfg, args.blocks, waveform_dir=args.dump_waveforms)
        emit(report.per_block_frame(), cfg, args.out)
        summary_path = None
        if args.out:
            out = Path(args.out)
            summary_path = str(out.with_name(f'{out.stem}_summary{out.suffix or ".csv"}'))
        emit(report.summary_frame(), cfg, summary_path)

    elif args.command == 'keyrate':
        inputs = SecurityInputs.from_config(cfg, eps=args.eps)
        if args.length is not None:
            inputs = inputs.replace(T=cfg.replace(length_L=args.length).transmittance)
        report = secret_key_rate(inputs)
        if report.null_rate:
            logger.warning(f"Taxa nula: taxa bruta {report.raw_rate:.4g} bps")
        emit(pd.DataFrame([report.as_row()]), cfg, args.out)

    elif args.command == 'sweep':
        distances = parse_distances(args.distances)
        frame = compare_modes(cfg, distances, args.eps) if args.both else sweep_distance(cfg, distances, args.eps)
        emit(frame, cfg, args.out, [f'eps={args.eps!r}'])

    elif args.command == 'threshold':
        emit(threshold_vs_distance(cfg, parse_distances(args.distances)), cfg, args.out)

    elif args.command == 'calibrate':
        emit(calibration_report(cfg, args.symbols), cfg, args.out)


def main(argv: Optional[List[str]] = None) -> int:
    setup_encoding()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_file)
    try:
        run_command(args)
    except CVQKDError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
