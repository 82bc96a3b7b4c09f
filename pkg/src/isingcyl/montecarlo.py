"""Monte Carlo cross-check of the exact formulas at larger sizes.

Wolff cluster updates are the default at the critical point; a Metropolis
single-spin sweep is available for off-critical smoke tests.  Both sample
the cylinder Hamiltonian (periodic horizontal, free vertical), including
the doubled horizontal bond at N = 1: the duplicate adjacency entry gives
two independent activation trials on the same pair, i.e. combined bond
probability 1 - e^{-4 beta}.

Error bars come from batch means over 32 batches; the variance stderr is
a jackknife over the same batches.  Runs are deterministic given the seed.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ResourceLimitError, ValidationError
from .oracle import _adjacency
from .spectrum import LatticeSpec, check_beta

N_BATCHES = 32
MAX_SPINS_MC = 10**6


@dataclass(frozen=True)
class McConfig:
    spec: LatticeSpec
    beta: float
    sweeps: int
    burn_in: int
    seed: int = 0
    algorithm: str = "wolff"

    def __post_init__(self):
        check_beta(self.beta)
        if self.sweeps < 100:
            raise ValidationError(f"sweeps must be >= 100, got {self.sweeps}")
        if self.burn_in < 10:
            raise ValidationError(f"burn_in must be >= 10, got {self.burn_in}")
        if self.algorithm not in ("wolff", "metropolis"):
            raise ValidationError(f"unknown algorithm {self.algorithm!r}")
        if not (0 <= self.seed < 2**64):
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    mean_stderr: float
    variance: float
    variance_stderr: float
    diagnostics: dict = field(default_factory=dict)


@njit(cache=True, nogil=True)
def _total_energy(adj, deg, spins):
    e = 0
    for i in range(spins.size):
        for m in range(deg[i]):
            e -= spins[i] * spins[adj[i, m]]
    return e // 2


@njit(cache=True, nogil=True)
def _metropolis_run(adj, deg, spins, beta, sweeps, burn_in, seed, energies):
    np.random.seed(seed)
    n = spins.size
    e = _total_energy(adj, deg, spins)
    accepted = 0
    for sweep in range(burn_in + sweeps):
        for _ in range(n):
            i = np.random.randint(0, n)
            d = 0
            for m in range(deg[i]):
                d += spins[adj[i, m]]
            de = 2 * spins[i] * d
            if de <= 0 or np.random.random() < math.exp(-beta * de):
                spins[i] = -spins[i]
                e += de
                accepted += 1
        if sweep >= burn_in:
            energies[sweep - burn_in] = e
    return accepted


@njit(cache=True, nogil=True)
def _wolff_run(adj, deg, spins, beta, sweeps, burn_in, seed, energies):
    np.random.seed(seed)
    n = spins.size
    p_add = 1.0 - math.exp(-2.0 * beta)
    stack = np.empty(n, dtype=np.int64)
    members = np.empty(n, dtype=np.int64)
    in_cluster = np.zeros(n, dtype=np.bool_)
    total_size = 0
    for sweep in range(burn_in + sweeps):
        start = np.random.randint(0, n)
        sp = 0
        nm = 0
        stack[sp] = start
        sp += 1
        in_cluster[start] = True
        while sp > 0:
            sp -= 1
            i = stack[sp]
            members[nm] = i
            nm += 1
            for m in range(deg[i]):
                j = adj[i, m]
                if not in_cluster[j] and spins[j] == spins[i]:
                    if np.random.random() < p_add:
                        in_cluster[j] = True
                        stack[sp] = j
                        sp += 1
        for m in range(nm):
            i = members[m]
            spins[i] = -spins[i]
            in_cluster[i] = False
        if sweep >= burn_in:
            energies[sweep - burn_in] = _total_energy(adj, deg, spins)
            total_size += nm
    return total_size


@njit(cache=True, nogil=True)
def _metropolis_state_counts(adj, deg, n, beta, steps, seed):
    """Per-microstate visit counts for small lattices (detailed balance test)."""
    np.random.seed(seed)
    spins = np.full(n, -1, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    state = 0
    for _ in range(steps):
        i = np.random.randint(0, n)
        d = 0
        for m in range(deg[i]):
            d += spins[adj[i, m]]
        de = 2 * spins[i] * d
        if de <= 0 or np.random.random() < math.exp(-beta * de):
            spins[i] = -spins[i]
            state ^= 1 << i
        counts[state] += 1
    return counts


def _seed32(seed):
    return int(np.random.SeedSequence(seed).generate_state(1)[0])


def _batch_stats(energies):
    n = energies.size
    per = n // N_BATCHES
    trimmed = energies[: per * N_BATCHES].reshape(N_BATCHES, per)
    batch_means = trimmed.mean(axis=1)
    mean = float(energies.mean())
    mean_stderr = float(batch_means.std(ddof=1) / math.sqrt(N_BATCHES))

    variance = float(energies.var())
    # jackknife the variance estimate over batches
    jack = np.empty(N_BATCHES)
    for k in range(N_BATCHES):
        rest = np.delete(trimmed, k, axis=0).ravel()
        jack[k] = rest.var()
    var_stderr = float(
        math.sqrt((N_BATCHES - 1) / N_BATCHES * np.sum((jack - jack.mean()) ** 2))
    )
    return mean, mean_stderr, variance, max(var_stderr, 1e-300)


def run(config: McConfig) -> McEstimate:
    """Sample the model and estimate <E>, Var(E) with error bars."""
    spec = config.spec
    if spec.n_spins > MAX_SPINS_MC:
        raise ResourceLimitError(
            f"lattice has {spec.n_spins} spins; Monte Carlo cap is {MAX_SPINS_MC}"
        )
    adj, deg = _adjacency(spec)
    spins = np.full(spec.n_spins, -1, dtype=np.int64)
    energies = np.empty(config.sweeps, dtype=np.float64)
    seed = _seed32(config.seed)

    if config.algorithm == "metropolis":
        accepted = _metropolis_run(
            adj, deg, spins, config.beta, config.sweeps, config.burn_in, seed, energies
        )
        diag = {
            "acceptance_rate": accepted
            / ((config.sweeps + config.burn_in) * spec.n_spins)
        }
    else:
        total_size = _wolff_run(
            adj, deg, spins, config.beta, config.sweeps, config.burn_in, seed, energies
        )
        diag = {"mean_cluster_size": total_size / config.sweeps}

    mean, mean_se, var, var_se = _batch_stats(energies)
    return McEstimate(
        mean=mean,
        mean_stderr=mean_se,
        variance=var,
        variance_stderr=var_se,
        diagnostics=diag,
    )


def run_chains(config: McConfig, chains=1):
    """Run independent chains with per-chain derived seeds and merge the
    estimates by inverse-variance weighting.  chains=1 reproduces run()."""
    if chains < 1:
        raise ValidationError(f"chains must be >= 1, got {chains}")
    if chains == 1:
        return run(config)
    children = np.random.SeedSequence(config.seed).spawn(chains)
    ests = []
    for child in children:
        cfg = McConfig(
            spec=config.spec,
            beta=config.beta,
            sweeps=config.sweeps,
            burn_in=config.burn_in,
            seed=int(child.generate_state(1, dtype=np.uint64)[0]),
            algorithm=config.algorithm,
        )
        ests.append(run(cfg))

    def merge(vals, errs):
        w = 1.0 / np.square(errs)
        return float(np.sum(w * vals) / np.sum(w)), float(1.0 / math.sqrt(np.sum(w)))

    mean, mean_se = merge(np.array([e.mean for e in ests]),
                          np.array([e.mean_stderr for e in ests]))
    var, var_se = merge(np.array([e.variance for e in ests]),
                        np.array([e.variance_stderr for e in ests]))
    return McEstimate(mean, mean_se, var, var_se, {"chains": chains})


def dump_timeseries(config: McConfig, path):
    """Write (sweep, energy) CSV for the configured run; returns the estimate."""
    spec = config.spec
    adj, deg = _adjacency(spec)
    spins = np.full(spec.n_spins, -1, dtype=np.int64)
    energies = np.empty(config.sweeps, dtype=np.float64)
    seed = _seed32(config.seed)
    if config.algorithm == "metropolis":
        _metropolis_run(adj, deg, spins, config.beta, config.sweeps,
                        config.burn_in, seed, energies)
    else:
        _wolff_run(adj, deg, spins, config.beta, config.sweeps,
                   config.burn_in, seed, energies)
    with open(path, "w", newline="") as fh:
        fh.write("sweep,energy\n")
        for i, e in enumerate(energies):
            fh.write(f"{i},{e:.17g}\n")
    mean, mean_se, var, var_se = _batch_stats(energies)
    return McEstimate(mean, mean_se, var, var_se, {})
