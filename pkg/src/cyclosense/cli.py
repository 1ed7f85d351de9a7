"""Command-line interface.

Subcommands:
  roc         Monte Carlo ROC sweep over SNR and target-Pf grids -> CSV.
  profile     Cycle-frequency profile of a generated or file-loaded
              signal -> CSV (`alpha_hz,i_alpha`).
  detect      One-shot H0/H1 decision on a signal file, against a stored
              threshold file or a threshold calibrated on the spot.
  calibrate   Calibrate a detection threshold for a target false-alarm
              rate at a stated noise variance -> threshold file.
  complexity  Print the analytical operation-count comparison.

Exit codes: 0 success, 2 configuration/usage error, 3 I/O error.
"""

import argparse
import sys

import numpy as np

from .detect import DetectorKind, calibrate_threshold, cycle_metric, decide, energy_metric
from .errors import CalibrationError, ConfigurationError
from .harness import (PHASE_ONESHOT, PHASE_PROFILE, SensingConfig, complexity_model,
                      derive_seed, emit_roc_csv, read_threshold_file, run_roc,
                      write_roc_csv, write_threshold_file, _snr_token)
from .scd import WindowKind, cycle_profile, dft, make_window, scd_slice, write_profile_csv
from .siggen import (ChannelSpec, ModulationKind, ModulationSpec, add_awgn,
                     generate_am, generate_bpsk, noise_only, read_signal_file)

_DEFAULT_SNR_DB = (-22.0,)
_DEFAULT_TARGET_PF = (0.01, 0.1)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--modulation", choices=["am", "bpsk"], default="am",
                        help="primary-user modulation (default: am)")
    parser.add_argument("--fc-hz", type=float, default=1e6,
                        help="carrier frequency; the cycle detector monitors "
                             "alpha = 2*fc (default: 1e6)")
    parser.add_argument("--fs-hz", type=float, default=3e6,
                        help="sampling rate (default: 3e6)")
    parser.add_argument("--bandwidth-hz", type=float, default=10e3,
                        help="one-sided AM message bandwidth (default: 1e4)")
    parser.add_argument("--am-mod-index", type=float, default=0.5,
                        help="AM modulation index in [0, 1]; the message is "
                             "brick-wall lowpassed unit-RMS Gaussian noise "
                             "(default: 0.5)")
    parser.add_argument("--symbol-rate-hz", type=float, default=10e3,
                        help="BPSK symbol rate (default: 1e4)")
    parser.add_argument("--n", type=int, default=4096,
                        help="samples per sensing buffer (default: 4096)")
    parser.add_argument("--smoothing-len", type=int, default=1301,
                        help="frequency-smoothing window length, odd "
                             "(default: 1301)")
    parser.add_argument("--window", choices=["hamming", "rectangular"],
                        default="hamming", help="smoothing window kind")
    parser.add_argument("--snr-db", type=float, action="append", default=None,
                        help="SNR in dB over the full sampling band; repeatable "
                             "for roc (default: -22)")
    parser.add_argument("--target-pf", type=float, action="append", default=None,
                        help="target false-alarm probability; repeatable for roc "
                             "(default: 0.01 and 0.1)")
    parser.add_argument("--trials", type=int, default=2000,
                        help="measurement trials per hypothesis (default: 2000)")
    parser.add_argument("--calibration-trials", type=int, default=2000,
                        help="noise-only trials used to set thresholds "
                             "(default: 2000)")
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed; every trial seed derives from it "
                             "(default: 0)")


def _modulation_from_args(args) -> ModulationSpec:
    return ModulationSpec(
        kind=ModulationKind(args.modulation),
        carrier_hz=args.fc_hz,
        bandwidth_hz=args.bandwidth_hz,
        am_mod_index=args.am_mod_index,
        symbol_rate_hz=args.symbol_rate_hz,
    )


def config_from_args(args) -> SensingConfig:
    """Map parsed flags onto a SensingConfig (defaults mirror the parser's)."""
    return SensingConfig(
        modulation=_modulation_from_args(args),
        n_samples=args.n,
        smoothing_len=args.smoothing_len,
        sample_rate_hz=args.fs_hz,
        snr_db_list=tuple(args.snr_db) if args.snr_db else _DEFAULT_SNR_DB,
        target_pf_list=tuple(args.target_pf) if args.target_pf else _DEFAULT_TARGET_PF,
        trials=args.trials,
        calibration_trials=args.calibration_trials,
        master_seed=args.seed,
        window_kind=WindowKind(args.window),
        h1_trials=getattr(args, "h1_trials", None),
    )


def _single_value(values, default, flag):
    if values is None:
        return default
    if len(values) > 1:
        raise ConfigurationError(f"{flag} may be given at most once here")
    return values[0]


def _load_or_generate_buffer(args):
    """Signal for the one-shot subcommands: file if --input, else generated."""
    snr_db = _single_value(args.snr_db, None, "--snr-db")
    if args.input is not None:
        buffer = read_signal_file(args.input)
    else:
        spec = _modulation_from_args(args)
        token = 0 if snr_db is None else _snr_token(snr_db)
        seed = derive_seed(args.seed, PHASE_PROFILE, token, 0, 0)
        if spec.kind is ModulationKind.AM:
            buffer = generate_am(spec, args.n, args.fs_hz, seed)
        else:
            buffer = generate_bpsk(spec, args.n, args.fs_hz, seed)
    if snr_db is not None:
        noise_seed = derive_seed(args.seed, PHASE_PROFILE, _snr_token(snr_db), 0, 1)
        buffer = add_awgn(buffer, ChannelSpec(snr_db, noise_seed))
    return buffer


def _cmd_profile(args) -> int:
    buffer = _load_or_generate_buffer(args)
    n = len(buffer)
    window = make_window(WindowKind(args.window), args.smoothing_len)
    fres = buffer.sample_rate_hz / n
    step = 2.0 * fres
    max_shift = (n - 1) // 2
    if args.alpha_max_hz is not None:
        if not args.alpha_max_hz > 0:
            raise ConfigurationError("--alpha-max-hz must be positive")
        max_shift = min(max_shift, int(args.alpha_max_hz // step))
    stride = 1
    if args.alpha_step_hz is not None:
        stride = max(1, round(args.alpha_step_hz / step))
    shifts = np.arange(-max_shift, max_shift + 1, stride)
    alphas = 2.0 * shifts * fres
    profile = cycle_profile(buffer, alphas, window)
    if args.out is not None:
        with open(args.out, "w", newline="\n") as fh:
            write_profile_csv(profile, fh)
    else:
        write_profile_csv(profile, sys.stdout)
    return 0


def _calibrate_threshold_from_noise(args, detector, target_pf, n, sample_rate_hz):
    """Noise-only Monte Carlo calibration at an explicit noise variance.

    The ROC harness derives the noise level from SNR, but one-shot
    decisions on external signals have no SNR handle, so the level is
    given directly via --noise-variance.
    """
    if args.noise_variance is None:
        raise ConfigurationError(
            "--noise-variance is required when no threshold file is given"
        )
    if not args.noise_variance > 0:
        raise ConfigurationError("--noise-variance must be positive")
    window = make_window(WindowKind(args.window), args.smoothing_len)
    ts = 1.0 / sample_rate_hz
    alpha0 = 2.0 * args.fc_hz
    values = np.empty(args.calibration_trials)
    for trial in range(args.calibration_trials):
        seed = derive_seed(args.seed, PHASE_ONESHOT, 0, trial, 0)
        buffer = noise_only(n, args.noise_variance, seed, sample_rate_hz)
        if detector is DetectorKind.CYCLE_FEATURE:
            piece = scd_slice(dft(buffer), alpha0, window, ts)
            values[trial] = cycle_metric(piece).value
        else:
            values[trial] = energy_metric(buffer).value
    return calibrate_threshold(values, target_pf, detector)


def _cmd_calibrate(args) -> int:
    detector = DetectorKind(args.detector)
    target_pf = _single_value(args.target_pf, 0.1, "--target-pf")
    threshold = _calibrate_threshold_from_noise(
        args, detector, target_pf, args.n, args.fs_hz)
    if args.out is not None:
        write_threshold_file(threshold, args.out)
    else:
        sys.stdout.write(
            f"{threshold.detector.value},{threshold.target_pf!r},{threshold.value!r}\n")
    return 0


def _cmd_detect(args) -> int:
    buffer = read_signal_file(args.input)
    n = len(buffer)
    detector = DetectorKind(args.detector)
    if args.threshold_file is not None:
        threshold = read_threshold_file(args.threshold_file)
    else:
        target_pf = _single_value(args.target_pf, 0.1, "--target-pf")
        threshold = _calibrate_threshold_from_noise(
            args, detector, target_pf, n, buffer.sample_rate_hz)
    if detector is DetectorKind.CYCLE_FEATURE:
        window = make_window(WindowKind(args.window), args.smoothing_len)
        piece = scd_slice(dft(buffer), 2.0 * args.fc_hz, window,
                          1.0 / buffer.sample_rate_hz)
        metric = cycle_metric(piece)
    else:
        metric = energy_metric(buffer)
    decision = decide(metric, threshold)
    print(f"decision={decision.value} detector={detector.value} "
          f"metric={metric.value!r} threshold={threshold.value!r}")
    return 0


def _cmd_roc(args) -> int:
    config = config_from_args(args)
    points = run_roc(config, workers=args.workers)
    if args.out is not None:
        emit_roc_csv(points, args.out)
    else:
        write_roc_csv(points, sys.stdout)
    return 0


def _cmd_complexity(args) -> int:
    report = complexity_model(args.n, args.smoothing_len)
    print(f"n={report.n} smoothing_len={report.l}")
    print(f"proposed_real_mul={report.proposed_real_mul}")
    print(f"proposed_real_add={report.proposed_real_add}")
    print(f"energy_real_mul={report.energy_real_mul}")
    print(f"energy_real_add={report.energy_real_add}")
    print(f"mul_ratio={report.mul_ratio!r}")
    print(f"add_ratio={report.add_ratio!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclosense",
        description="Cyclostationary-feature spectrum sensing with an "
                    "energy-detection baseline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    roc = sub.add_parser("roc", help="Monte Carlo ROC sweep -> CSV")
    _add_common_flags(roc)
    roc.add_argument("--h1-trials", type=int, default=None,
                     help="signal-present trials (default: same as --trials)")
    roc.add_argument("--workers", type=int, default=1,
                     help="worker processes; results are byte-identical for "
                          "any value (default: 1)")
    roc.add_argument("--out", default=None, help="CSV path (default: stdout)")
    roc.set_defaults(func=_cmd_roc)

    profile = sub.add_parser("profile", help="cycle-frequency profile -> CSV")
    _add_common_flags(profile)
    profile.add_argument("--input", default=None,
                         help="signal file to analyze instead of generating")
    profile.add_argument("--alpha-max-hz", type=float, default=None,
                         help="largest |alpha| in the grid (default: just "
                              "under the sampling rate)")
    profile.add_argument("--alpha-step-hz", type=float, default=None,
                         help="grid step, rounded to a multiple of the "
                              "representable 2*Fs step (default: 2*Fs)")
    profile.add_argument("--out", default=None, help="CSV path (default: stdout)")
    profile.set_defaults(func=_cmd_profile)

    detect = sub.add_parser("detect", help="one-shot decision on a signal file")
    _add_common_flags(detect)
    detect.add_argument("--input", required=True, help="signal file to sense")
    detect.add_argument("--detector", choices=[d.value for d in DetectorKind],
                        default=DetectorKind.CYCLE_FEATURE.value)
    detect.add_argument("--threshold-file", default=None,
                        help="stored threshold; otherwise calibrate now from "
                             "--noise-variance")
    detect.add_argument("--noise-variance", type=float, default=None,
                        help="noise variance for on-the-spot calibration")
    detect.set_defaults(func=_cmd_detect)

    calibrate = sub.add_parser("calibrate",
                               help="calibrate a threshold -> threshold file")
    _add_common_flags(calibrate)
    calibrate.add_argument("--detector", choices=[d.value for d in DetectorKind],
                           default=DetectorKind.CYCLE_FEATURE.value)
    calibrate.add_argument("--noise-variance", type=float, default=None,
                           help="noise variance of the H0 calibration buffers")
    calibrate.add_argument("--out", default=None,
                           help="threshold file path (default: stdout)")
    calibrate.set_defaults(func=_cmd_calibrate)

    complexity = sub.add_parser(
        "complexity",
        help="analytical operation counts",
        description="Closed-form real-operation counts for one sensing "
                    "decision.  --smoothing-len is used verbatim here (even "
                    "values accepted); the estimator itself requires an odd "
                    "window and defaults to 1301.",
    )
    complexity.add_argument("--n", type=int, default=4096,
                            help="transform size, power of two (default: 4096)")
    complexity.add_argument("--smoothing-len", type=int, default=1301,
                            help="window length in the count formulas "
                                 "(default: 1301)")
    complexity.set_defaults(func=_cmd_complexity)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigurationError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
