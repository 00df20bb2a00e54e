"""
Compare finite-difference and Hellmann-Feynman charge T2 curves over EJ/Ec
Run with: python3 compare_slope_methods.py [ratio_min ratio_max points]
"""
import os
import sys

import numpy as np
import pandas as pd

# Add parent directory to path
parent_dir = os.path.dirname(os.path.abspath(__file__))
if parent_dir not in sys.path:
    sys.path.insert(0, parent_dir)

from app.config.settings import DEFAULT_AMPLITUDES, DEFAULT_ASYMMETRY, DEFAULT_EC
from app.models.circuit import CircuitParams, TruncationConfig
from app.models.noise import ChannelKind, NoiseChannel, OperatingPoint, Policy, SlopeMethod
from app.services.asymptotic_service import percent_error
from app.services.noise_service import t2_pure, worst_case_point


def charge_t2_curves(ratios, ec=DEFAULT_EC, d=DEFAULT_ASYMMETRY):
    """Charge T2 by both estimators, sharing one worst-case bias per ratio."""
    trunc = TruncationConfig()
    channel = NoiseChannel(ChannelKind.CHARGE, DEFAULT_AMPLITUDES["charge"])

    records = []
    for ratio in ratios:
        params = CircuitParams(ej_sum=ratio * ec, ec=ec, d=d, ng=0.5)
        point = worst_case_point(params, trunc, ChannelKind.CHARGE)
        fd = t2_pure(params, trunc, channel, point, SlopeMethod.FINITE_DIFFERENCE)
        hf = t2_pure(params, trunc, channel, point, SlopeMethod.HELLMANN_FEYNMAN)
        records.append({
            'ratio': float(ratio),
            'ng_star': point.ng,
            't2_fd_s': fd.t2_seconds,
            't2_hf_s': hf.t2_seconds,
        })
    return pd.DataFrame(records)


def compare_methods(ratio_min=20.0, ratio_max=80.0, points=25):
    print("📊 COMPARING SLOPE ESTIMATORS: charge T2, finite difference vs Hellmann-Feynman")
    print("="*80)

    df = charge_t2_curves(np.linspace(ratio_min, ratio_max, points))
    errors = percent_error(
        list(zip(df['ratio'], df['t2_fd_s'])),
        list(zip(df['ratio'], df['t2_hf_s'])),
    )
    df['err_pct'] = [error for _, error in errors]

    print(f"\n{'EJ/Ec':>10} {'ng*':>10} {'T2 FD (s)':>16} {'T2 HF (s)':>16} {'Error %':>12}")
    print("-"*80)
    for _, row in df.iterrows():
        print(f"{row['ratio']:>10.3f} {row['ng_star']:>10.5f} {row['t2_fd_s']:>16.6e} "
              f"{row['t2_hf_s']:>16.6e} {row['err_pct']:>12.3e}")

    print(f"\n{'='*80}")
    print(f"Max error: {df['err_pct'].max():.3e} %")
    return df


if __name__ == "__main__":
    if len(sys.argv) == 4:
        compare_methods(float(sys.argv[1]), float(sys.argv[2]), int(sys.argv[3]))
    else:
        compare_methods()
