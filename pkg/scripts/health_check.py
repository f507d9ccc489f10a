#!/usr/bin/env python3
"""
Health Check Script for the PT-Symmetric Dimer Simulator

Runs fast self-checks of every solver on tiny systems and verifies that the
shipped figure configurations parse. Exit code 0 when everything passes.
"""

import sys
import os
import glob
import subprocess

import numpy as np

# Add project paths
project_root = os.path.join(os.path.dirname(__file__), '..')
sys.path.insert(0, os.path.join(project_root, 'src'))
sys.path.insert(0, project_root)

from config.config import expand_sweep, load_config_from_file
from physics.errors import ExistenceError
from physics.fock import SystemParams, build_product_state
from physics.master_exact import BlockDensityMatrix, block_moments, evolve_exact, lindblad_rhs
from physics.meanfield import gpe_evolve, stationary_states
from physics.observables import moment_series_observables
from physics.trajectories import TrajectoryConfig, run_ensemble

FIGURE_PAIR = (0.5 + 0.5j, 0.5 - 0.5j)


def check_figure_configs():
    """Check that every shipped figure configuration parses and validates"""
    print("📁 Checking Figure Configurations...")

    paths = sorted(glob.glob(os.path.join(project_root, 'config', 'figures', '*.cfg')))
    if not paths:
        print("  ❌ No figure configurations found")
        return False

    all_valid = True
    for path in paths:
        name = os.path.basename(path)
        try:
            runs = expand_sweep(load_config_from_file(path))
            print(f"  ✅ {name} ({len(runs)} run{'s' if len(runs) > 1 else ''})")
        except Exception as e:
            print(f"  ❌ {name}: {e}")
            all_valid = False
    return all_valid


def check_pure_limit():
    """Without gain, loss and interaction the condensate stays pure"""
    print("🧪 Checking Pure Limit...")

    params = SystemParams(J=1.0, g=0.0, N0=4, gamma_loss=0.0)
    state = build_product_state(*FIGURE_PAIR, params.N0)

    exact = moment_series_observables(
        evolve_exact(BlockDensityMatrix.from_pure(state, 6), 1.0, 1e-3, params, sample_interval=0.1)
    )
    exact_error = float(np.max(np.abs(exact["purity"] - 1.0)))

    ensemble = run_ensemble(
        TrajectoryConfig(params=params, initial=state, t_final=1.0, sample_interval=0.1, n_trajectories=4),
        workers=1,
    )
    trajectory_error = float(np.max(np.abs(moment_series_observables(ensemble.series)["purity"] - 1.0)))

    ok = exact_error < 1e-8 and trajectory_error < 1e-8 and ensemble.total_jumps == 0
    print(f"  {'✅' if ok else '❌'} exact |P - 1| = {exact_error:.1e}, "
          f"trajectories |P - 1| = {trajectory_error:.1e}, jumps = {ensemble.total_jumps}")
    return ok


def check_balance_law():
    """Gain and loss cancel for a balanced initial state"""
    print("⚖️  Checking Balance Law...")

    all_ok = True
    for N0 in (4, 10):
        params = SystemParams(J=1.0, g=0.5, N0=N0, gamma_loss=0.5)
        rho0 = BlockDensityMatrix.from_pure(build_product_state(*FIGURE_PAIR, N0), 2 * N0 + 10)
        dm11, dm22, _ = block_moments(lindblad_rhs(rho0, params))
        rate = abs(dm11 + dm22)
        ok = rate < 1e-10
        all_ok = all_ok and ok
        print(f"  {'✅' if ok else '❌'} N0 = {N0}: |d<n>/dt| at t = 0 is {rate:.1e}")
    return all_ok


def check_stationary_state():
    """Mean-field ground state keeps its moduli"""
    print("🌀 Checking Stationary State...")

    params = SystemParams(J=1.0, g=0.5, N0=100, gamma_loss=0.5)
    ground = stationary_states(params)["ground"]
    samples = gpe_evolve(ground, 2.0, 1e-3, params, sample_interval=0.5)
    drift = max(abs(abs(c.c1) - abs(ground.c1)) + abs(abs(c.c2) - abs(ground.c2)) for _, c in samples)

    try:
        stationary_states(SystemParams(J=1.0, g=0.5, gamma_loss=2.5))
        gate = False
    except ExistenceError:
        gate = True

    ok = drift < 1e-6 and gate
    print(f"  {'✅' if ok else '❌'} modulus drift = {drift:.1e}, existence gate {'works' if gate else 'broken'}")
    return ok


def check_simulate_script():
    """Check if the simulation script can start"""
    print("⚙️  Checking Simulation Script...")

    try:
        result = subprocess.run([
            sys.executable, 'scripts/simulate.py', '--help'
        ], cwd=project_root, capture_output=True, text=True, timeout=30)

        if result.returncode == 0:
            print("  ✅ Simulation script help works")
            return True
        else:
            print(f"  ❌ Simulation script error: {result.stderr}")
            return False
    except Exception as e:
        print(f"  ❌ Simulation script check failed: {e}")
        return False


def main():
    """Run all health checks"""
    print("🏥 PT-Symmetric Dimer Simulator Health Check")
    print("=" * 50)

    results = {
        'Figure Configurations': check_figure_configs(),
        'Pure Limit': check_pure_limit(),
        'Balance Law': check_balance_law(),
        'Stationary State': check_stationary_state(),
        'Simulation Script': check_simulate_script(),
    }

    print("\n📊 Health Check Summary")
    print("=" * 50)
    for name, ok in results.items():
        print(f"{'✅' if ok else '❌'} {name}")

    print("\n🎯 Overall Status")
    print("=" * 50)
    if all(results.values()):
        print("✅ Simulator is fully operational!")
        print("\n🚀 Ready to use:")
        print("   • Run a figure: python3 scripts/simulate.py --config config/figures/fig1c.cfg")
        print("   • Health check: python3 scripts/health_check.py")
        return 0
    else:
        print("❌ Simulator has issues that need attention")
        return 1


if __name__ == "__main__":
    sys.exit(main())
