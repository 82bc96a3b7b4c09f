"""Brute-force ground truth for small cylinders.

Enumerates every spin configuration with a Gray code (one flip per step,
O(1) incremental energy update) and histograms the exact integer energy.
Partition function, MGF, and moments then follow from the histogram with
log-sum-exp arithmetic.

Spin layout is row-major bit packing: bit index (j-1)*2N + (k-1) for row
j = 1..2M and column k = 1..2N.  Horizontal bonds wrap (k = 2N+1 is column
1); for N = 1 the two horizontal terms per row traverse the same pair and
both are counted.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ResourceLimitError, ValidationError
from .spectrum import LatticeSpec

MAX_SPINS = 28


def bond_list(spec: LatticeSpec):
    """All bond terms of the Hamiltonian as (site_a, site_b) index pairs."""
    W, H = 2 * spec.N, 2 * spec.M
    bonds = []
    for j in range(H):
        for k in range(W):
            bonds.append((j * W + k, j * W + (k + 1) % W))  # horizontal, wraps
    for j in range(H - 1):
        for k in range(W):
            bonds.append((j * W + k, (j + 1) * W + k))  # vertical, free ends
    return bonds


def _adjacency(spec):
    """Per-site incident-neighbor table; duplicates encode doubled bonds."""
    n = spec.n_spins
    neigh = [[] for _ in range(n)]
    for a, b in bond_list(spec):
        neigh[a].append(b)
        neigh[b].append(a)
    deg = np.array([len(v) for v in neigh], dtype=np.int64)
    adj = np.full((n, int(deg.max())), -1, dtype=np.int64)
    for i, v in enumerate(neigh):
        adj[i, : len(v)] = v
    return adj, deg


@njit(cache=True, nogil=True)
def _gray_histogram(adj, deg, fixed_spins, n_free, e0, hist, offset):
    """Gray-code sweep over the n_free lowest spins, counting energies.

    fixed_spins holds the initial configuration (higher spins stay fixed);
    e0 is its energy.  hist is indexed by energy + offset.
    """
    spins = fixed_spins.copy()
    e = e0
    hist[e + offset] += 1
    total = 1 << n_free
    for i in range(1, total):
        # flip bit = count of trailing zeros of i
        b = 0
        j = i
        while j & 1 == 0:
            j >>= 1
            b += 1
        s = spins[b]
        d = 0
        for m in range(deg[b]):
            d += spins[adj[b, m]]
        e += 2 * s * d
        spins[b] = -s
        hist[e + offset] += 1


def _energy_of(adj, deg, spins):
    e = 0
    for i in range(len(spins)):
        for m in range(deg[i]):
            e -= spins[i] * spins[adj[i, m]]
    return e // 2


@dataclass(frozen=True)
class EnergyPmf:
    """Exact histogram: configuration count per integer energy."""

    spec: LatticeSpec
    entries: dict = field(default_factory=dict)

    def total_count(self):
        return sum(self.entries.values())

    def min_energy(self):
        return min(self.entries)

    def to_csv(self, dest):
        """Write 'energy,count' rows to a path or open text file."""
        if hasattr(dest, "write"):
            w = csv.writer(dest)
            w.writerow(["energy", "count"])
            for e in sorted(self.entries):
                w.writerow([e, self.entries[e]])
        else:
            with open(dest, "w", newline="") as fh:
                self.to_csv(fh)


def enumerate_pmf(spec, workers=1, max_spins=MAX_SPINS):
    """Exact energy histogram over all 2^{4MN} configurations."""
    n = spec.n_spins
    if n > max_spins:
        raise ResourceLimitError(
            f"enumeration needs 2^{n} states; cap is 4MN <= {max_spins}"
        )
    adj, deg = _adjacency(spec)
    emax = spec.n_bonds
    offset = emax

    shard_bits = 2 if (workers > 1 and n > 2) else 0
    n_free = n - shard_bits
    tasks = []
    for top in range(1 << shard_bits):
        spins = np.full(n, -1, dtype=np.int64)
        for b in range(shard_bits):
            if (top >> b) & 1:
                spins[n_free + b] = 1
        e0 = _energy_of(adj, deg, spins)
        hist = np.zeros(2 * emax + 1, dtype=np.int64)
        tasks.append((spins, e0, hist))

    def run(task):
        spins, e0, hist = task
        _gray_histogram(adj, deg, spins, n_free, e0, hist, offset)
        return hist

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, 4)) as pool:
            hists = list(pool.map(run, tasks))
    else:
        hists = [run(t) for t in tasks]

    total = np.sum(hists, axis=0)
    entries = {int(e - offset): int(c) for e, c in enumerate(total) if c > 0}
    return EnergyPmf(spec=spec, entries=entries)


def _weights(pmf, beta):
    energies = np.array(sorted(pmf.entries), dtype=np.float64)
    counts = np.array([pmf.entries[int(e)] for e in energies], dtype=np.float64)
    logw = -beta * energies + np.log(counts)
    shift = logw.max()
    return energies, np.exp(logw - shift), shift


def oracle_log_partition(pmf, beta):
    """ln sum_E count(E) e^{-beta E}, via log-sum-exp.

    Any real beta is accepted; by pmf symmetry the value is even in beta.
    """
    _, w, shift = _weights(pmf, beta)
    return shift + math.log(math.fsum(w))


def oracle_log_mgf(pmf, beta, s):
    """ln <e^{s E}> from the exact histogram."""
    e, w, _ = _weights(pmf, beta)
    z = math.fsum(w)
    # reuse the beta-shifted weights: <e^{sE}> = sum w e^{sE} / sum w
    m = (s * e).max()
    return m + math.log(math.fsum(w * np.exp(s * e - m)) / z)


def oracle_moments(pmf, beta):
    """Exact Boltzmann-weighted mean and variance of the energy."""
    if beta < 0:
        raise ValidationError(f"beta must be >= 0, got {beta}")
    e, w, _ = _weights(pmf, beta)
    z = math.fsum(w)
    mean = math.fsum(e * w) / z
    var = math.fsum((e - mean) ** 2 * w) / z
    from .partition import EnergyMoments

    return EnergyMoments(mean=mean, variance=var)


def enumerate_pmf_naive(spec):
    """Direct full re-evaluation per state; cross-check for the Gray code."""
    n = spec.n_spins
    if n > 20:
        raise ResourceLimitError("naive enumeration capped at 4MN <= 20")
    bonds = bond_list(spec)
    entries = {}
    for state in range(1 << n):
        spins = [1 if (state >> b) & 1 else -1 for b in range(n)]
        e = -sum(spins[a] * spins[b] for a, b in bonds)
        entries[e] = entries.get(e, 0) + 1
    return EnergyPmf(spec=spec, entries=entries)
