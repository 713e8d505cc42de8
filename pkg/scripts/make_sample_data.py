#!/usr/bin/env python3
"""Regenerate the bundled sample traces under scenarios/data/.

Both files are simulator output plus 1% Gaussian noise with a fixed
seed, so the shipped fit configs stay reproducible.
"""

from pathlib import Path

import numpy as np

from eprsim import (FieldOrientation, PumpModel, RelaxationParams,
                    SpinSystem, echo_detected_recovery_trace,
                    hahn_echo_decay, resonance_fields)

SEED = 20260816
OUT_DIR = Path(__file__).resolve().parent.parent / "scenarios" / "data"


def _write(path: Path, header: tuple[str, str], t, y) -> None:
    rows = "\n".join(f"{a:.6f},{b:.8f}" for a, b in zip(t, y))
    path.write_text(
        f"# simulated sample, seed {SEED}, 1% gaussian noise\n"
        f"{header[0]},{header[1]}\n{rows}\n")
    print(f"wrote {path}")


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    system = SpinSystem()
    low_line = next(l for l in resonance_fields(system, 0.0, 9308.0,
                                                3260.0, 3380.0)
                    if l.pair == (2, 3))
    field = FieldOrientation(low_line.field, 0.0)

    decay = hahn_echo_decay(system, field, (2, 3),
                            np.linspace(1.0, 120.0, 241),
                            relaxation=RelaxationParams(t1=354.0, t2=48.0))
    noisy = decay.intensity + rng.normal(
        0.0, 0.01 * np.max(np.abs(decay.intensity)), decay.axis.size)
    _write(OUT_DIR / "echo_decay_sample.csv", ("time_us", "echo"),
           decay.axis, noisy)

    recovery = echo_detected_recovery_trace(
        system, field, PumpModel(), np.linspace(0.0, 3000.0, 601),
        light_duration=1000.0)
    noisy = recovery.intensity + rng.normal(
        0.0, 0.01 * np.max(np.abs(recovery.intensity)),
        recovery.axis.size)
    _write(OUT_DIR / "pump_recovery_sample.csv", ("time_us", "signal"),
           recovery.axis, noisy)


if __name__ == "__main__":
    main()
