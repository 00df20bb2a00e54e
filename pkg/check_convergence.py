"""
Check charge-basis truncation convergence of E01
Run with: python3 check_convergence.py [ej_sum ec]
"""
import os
import sys

import pandas as pd

# Add parent directory to path
parent_dir = os.path.dirname(os.path.abspath(__file__))
if parent_dir not in sys.path:
    sys.path.insert(0, parent_dir)

from app.config.settings import (
    DEFAULT_ASYMMETRY,
    DEFAULT_CONVERGENCE_TOL_GHZ,
    DEFAULT_EC,
    DEFAULT_EJ_SUM,
    DEFAULT_NCUT,
    DEFAULT_NG,
    NCUT_STEP,
)
from app.models.circuit import CircuitParams, TruncationConfig
from app.services.spectrum_service import converge_ncut, e01_at


def check_convergence(ej_sum=DEFAULT_EJ_SUM, ec=DEFAULT_EC, steps=6):
    params = CircuitParams(ej_sum=ej_sum, ec=ec, d=DEFAULT_ASYMMETRY, ng=DEFAULT_NG)
    print(f"🔍 E01 CONVERGENCE at EJ/Ec = {params.ratio:.4f}")
    print("="*60)

    cutoffs = [DEFAULT_NCUT + k * NCUT_STEP for k in range(steps)]
    df = pd.DataFrame({'ncut': cutoffs, 'e01_ghz': [e01_at(params, ncut) for ncut in cutoffs]})
    df['change_ghz'] = df['e01_ghz'].diff().abs()

    print(f"\n{'ncut':>6} {'E01 (GHz)':>22} {'|change| (GHz)':>18}")
    print("-"*60)
    for _, row in df.iterrows():
        change = "" if pd.isna(row['change_ghz']) else f"{row['change_ghz']:.3e}"
        print(f"{int(row['ncut']):>6} {row['e01_ghz']:>22.15f} {change:>18}")

    ncut = converge_ncut(params, TruncationConfig())
    print(f"\n✅ Converged at ncut = {ncut} (tolerance {DEFAULT_CONVERGENCE_TOL_GHZ:g} GHz)")
    return df


if __name__ == "__main__":
    if len(sys.argv) == 3:
        check_convergence(float(sys.argv[1]), float(sys.argv[2]))
    else:
        check_convergence()
