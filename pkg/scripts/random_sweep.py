"""Randomized sweeps: direct vs derived hyper-quasi-identity checks, and the
class-operator cases on small random instances. Prints counts and exits
nonzero on any disagreement."""
from __future__ import annotations

import argparse
import random
import sys
import time
from dataclasses import dataclass

from halg import lab
from halg.hyper import Hypersubstitution, hyper_quasi_via_derived, satisfies_M_hyper_quasi_identity
from halg.randgen import (random_algebra, random_hypersub, random_monoid, random_prop43_instance,
                          random_quasi)
from halg.zoo import GROUPOID


@dataclass
class Config:
    seed: int = 0
    instances: int = 2000
    per_case: int = 200
    max_size: int = 3


def two_paths(cfg: Config, rng: random.Random) -> int:
    bad = failing = 0
    for _ in range(cfg.instances):
        A = random_algebra(rng, max_size=cfg.max_size)
        M = random_monoid(rng, A)
        q = random_quasi(rng, GROUPOID)
        a, b = satisfies_M_hyper_quasi_identity(A, M, q), hyper_quasi_via_derived(A, M, q)
        failing += not a.holds
        if a.holds != b.holds or a.witness != b.witness:
            bad += 1
            print("disagreement:", A.tables[0].tolist(), [s.describe() for s in M], q)
    print(f"two paths: {cfg.instances} instances, {failing} failing, {bad} disagreements")
    return bad


def class_operators(cfg: Config, rng: random.Random) -> int:
    bad = 0
    for case in range(1, 9):
        for _ in range(cfg.per_case):
            kw = random_prop43_instance(rng, case, max_size=cfg.max_size)
            M = [Hypersubstitution.identity(GROUPOID), random_hypersub(rng, GROUPOID)]
            rep = lab.check_prop43_case(case, M, **kw)
            if not rep:
                bad += 1
                print(f"case {case}: {rep.detail} for {rep.sigma.describe()}")
        print(f"case {case}: {cfg.per_case} instances")
    return bad


def main(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    t0 = time.perf_counter()
    bad = two_paths(cfg, rng) + class_operators(cfg, rng)
    print(f"total disagreements {bad}  ({time.perf_counter() - t0:.1f} s)")
    return 1 if bad else 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        p.add_argument("--" + name.replace("_", "-"), type=int, default=default)
    sys.exit(main(Config(**vars(p.parse_args()))))
