"""Seeded random draws of unitaries, observables, states and models.

All samplers take a ``numpy.random.Generator``; :func:`draw_streams` splits
one seed into independent per-draw generators so that any subset of draws
can be reproduced (or run in parallel) without replaying the others.
"""

from __future__ import annotations

import numpy as np

from .qmodel import DensityOperator, JointModel, MeasuringProcess, Observable, pauli


def draw_streams(seed: int | None, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    q, r = np.linalg.qr(ginibre(rng, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = ginibre(rng, dim)
    return (g + g.conj().T) / 2


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = ginibre(rng, dim, 1).ravel()
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Induced-measure mixed state of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    g = ginibre(rng, dim, rank)
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real)


def random_pure_state(dim: int, rng: np.random.Generator) -> DensityOperator:
    return DensityOperator.from_vector(random_unit_vector(dim, rng))


def random_binary_observable(dim: int, rng: np.random.Generator, n_minus: int | None = None) -> np.ndarray:
    """``V S V^dag`` with ``S = diag(+-1)`` and Haar ``V``; both signs present when ``dim >= 2``."""
    if n_minus is None:
        n_minus = int(rng.integers(1, dim)) if dim > 1 else 0
    signs = np.ones(dim)
    signs[dim - n_minus :] = -1.0
    v = haar_unitary(dim, rng)
    return (v * signs) @ v.conj().T


def _eigenspace(a: np.ndarray, sign: float) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    return v[:, np.abs(w - sign) < 1e-6]


def _zero_mean_vector(a, b, rng, max_tries: int = 200) -> np.ndarray | None:
    # <A> = 0 forces equal weight on the two eigenspaces: psi = (u + e^{i phi} v)/sqrt(2)
    plus, minus = _eigenspace(a, 1.0), _eigenspace(a, -1.0)
    if plus.shape[1] == 0 or minus.shape[1] == 0:
        return None
    for _ in range(max_tries):
        u = plus @ random_unit_vector(plus.shape[1], rng)
        v = minus @ random_unit_vector(minus.shape[1], rng)
        base = 0.5 * (np.vdot(u, b @ u) + np.vdot(v, b @ v)).real
        z = np.vdot(u, b @ v)
        if abs(z) < 1e-3 or abs(base) >= abs(z):
            continue
        # Re(e^{i phi} z) = -base
        phi = -np.angle(z) + rng.choice([-1.0, 1.0]) * np.arccos(-base / abs(z))
        psi = (u + np.exp(1j * phi) * v) / np.sqrt(2)
        return psi / np.linalg.norm(psi)
    return None


def zero_mean_state(a, b, rng: np.random.Generator, rank: int = 1, max_tries: int = 200) -> DensityOperator | None:
    """Random state with ``<A> = <B> = 0`` for +-1-valued ``A``, ``B``.

    Mixes ``rank`` random pure states from the zero-mean family with
    Dirichlet weights.  Returns ``None`` if the family looks empty.
    """
    a = a.matrix if isinstance(a, Observable) else np.asarray(a)
    b = b.matrix if isinstance(b, Observable) else np.asarray(b)
    rho = np.zeros_like(a, dtype=complex)
    weights = rng.dirichlet(np.ones(rank)) if rank > 1 else np.ones(1)
    for w in weights:
        psi = _zero_mean_vector(a, b, rng, max_tries)
        if psi is None:
            return None
        rho += w * np.outer(psi, psi.conj())
    return DensityOperator(rho)


def random_process(sys_dim: int, probe_dim: int, rng: np.random.Generator, binary: bool = False) -> MeasuringProcess:
    meter = random_binary_observable(probe_dim, rng) if binary else random_hermitian(probe_dim, rng)
    return MeasuringProcess(
        sys_dim=sys_dim,
        probe_dim=probe_dim,
        probe_state=random_unit_vector(probe_dim, rng),
        interaction=haar_unitary(sys_dim * probe_dim, rng),
        meter=Observable(meter),
    )


def random_joint_model(sys_dim: int, probe_dim: int, rng: np.random.Generator, binary: bool = False) -> JointModel:
    """Commuting outputs diagonal in a shared Haar basis."""
    n = sys_dim * probe_dim
    v = haar_unitary(n, rng)
    if binary:
        da, db = rng.choice([-1.0, 1.0], n), rng.choice([-1.0, 1.0], n)
    else:
        da, db = rng.standard_normal(n), rng.standard_normal(n)
    return JointModel(
        sys_dim=sys_dim,
        probe_dim=probe_dim,
        probe_state=random_unit_vector(probe_dim, rng),
        cal_a=Observable((v * da) @ v.conj().T),
        cal_b=Observable((v * db) @ v.conj().T),
    )



def _basis_from(v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random orthonormal basis whose first column is exactly ``v``."""
    q, _ = np.linalg.qr(np.column_stack([v, ginibre(rng, v.size, v.size - 1)]))
    q[:, 0] *= np.conj(np.vdot(v, q[:, 0]))
    return q


def map_vector(src: np.ndarray, dst: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random unitary ``S`` with ``S @ src = dst`` (unit vectors)."""
    return _basis_from(dst, rng) @ _basis_from(src, rng).conj().T


def random_error_free_process(a, rng: np.random.Generator) -> MeasuringProcess:
    """Process whose meter reproduces ``A`` exactly in every state.

    Conditioned on each eigenvector of ``A`` the probe is rotated onto the
    matching meter eigenvector; afterwards the system gets a random kick,
    which commutes with the probe read-out.
    """
    a = a.matrix if isinstance(a, Observable) else np.asarray(a)
    d = a.shape[0]
    lam, vecs = np.linalg.eigh(a)
    xi = random_unit_vector(d, rng)
    cu = sum(
        np.kron(np.outer(vecs[:, i], vecs[:, i].conj()), map_vector(xi, np.eye(d)[:, i], rng))
        for i in range(d)
    )
    kick = np.kron(haar_unitary(d, rng), np.eye(d))
    return MeasuringProcess(
        sys_dim=d, probe_dim=d, probe_state=xi, interaction=kick @ cu, meter=Observable(np.diag(lam))
    )


def random_nondisturbing_process(b, probe_dim: int, rng: np.random.Generator) -> MeasuringProcess:
    """Interaction controlled on the eigenbasis of ``B``, so ``B`` is left untouched."""
    b = b.matrix if isinstance(b, Observable) else np.asarray(b)
    d = b.shape[0]
    _, vecs = np.linalg.eigh(b)
    u = sum(
        np.kron(np.outer(vecs[:, j], vecs[:, j].conj()), haar_unitary(probe_dim, rng)) for j in range(d)
    )
    return MeasuringProcess(
        sys_dim=d,
        probe_dim=probe_dim,
        probe_state=random_unit_vector(probe_dim, rng),
        interaction=u,
        meter=Observable(random_hermitian(probe_dim, rng)),
    )


SCENARIOS = (
    "generic",
    "pure",
    "binary",
    "zx",
    "circle",
    "error_free",
    "nondisturbing",
    "joint",
    "joint_binary",
)


def _binary_pair_and_state(d: int, rng: np.random.Generator):
    while True:
        a = random_binary_observable(d, rng)
        b = random_binary_observable(d, rng)
        rho = zero_mean_state(a, b, rng, rank=int(rng.integers(1, d + 1)))
        if rho is not None:
            return Observable(a), Observable(b), rho


def draw_scenario(scenario: str, sys_dim: int, probe_dim: int, rng: np.random.Generator):
    """One random ``(model, A, B, rho)``.

    ``generic``
        Haar interaction, Gaussian Hermitian meter and observables, full-rank
        random state.  ``pure`` is the same with a random pure state.
    ``binary``
        +-1 meter and observables, state with ``<A> = <B> = 0``.
    ``zx``
        Qubit with ``A=Z``, ``B=X``, ``rho=(I+Y)/2`` and a random +-1 meter.
    ``circle``
        A random rotation of ``(Z, X, (I + alpha Y)/2)`` with a +-1 meter,
        so that the commutator bound ``D`` equals one.
    ``error_free`` / ``nondisturbing``
        Processes with ``eps(A) = 0`` (probe dimension forced to the system
        dimension) or ``eta(B) = 0``.
    ``joint`` / ``joint_binary``
        A :class:`JointModel` with commuting outputs drawn directly rather
        than from a process; the binary variant uses a zero-mean state.
    """
    d, k = sys_dim, probe_dim
    if scenario in ("generic", "pure"):
        p = random_process(d, k, rng)
        a, b = Observable(random_hermitian(d, rng)), Observable(random_hermitian(d, rng))
        rho = random_pure_state(d, rng) if scenario == "pure" else random_density(d, rng)
        return p, a, b, rho
    if scenario == "binary":
        a, b, rho = _binary_pair_and_state(d, rng)
        return random_process(d, k, rng, binary=True), a, b, rho
    if scenario in ("zx", "circle"):
        if d != 2:
            raise ValueError(f"the {scenario} scenario needs a qubit system")
        p = random_process(2, k, rng, binary=True)
        if scenario == "zx":
            return p, pauli("Z"), pauli("X"), DensityOperator.from_bloch(0.0, 1.0, 0.0)
        v = haar_unitary(2, rng)
        rot = lambda m: v @ m @ v.conj().T  # noqa: E731
        alpha = rng.uniform(-1.0, 1.0)
        rho = DensityOperator(rot(DensityOperator.from_bloch(0.0, alpha, 0.0).rho))
        return p, Observable(rot(pauli("Z").matrix)), Observable(rot(pauli("X").matrix)), rho
    if scenario == "error_free":
        a, b = Observable(random_hermitian(d, rng)), Observable(random_hermitian(d, rng))
        return random_error_free_process(a, rng), a, b, random_density(d, rng)
    if scenario == "nondisturbing":
        a, b = Observable(random_hermitian(d, rng)), Observable(random_hermitian(d, rng))
        return random_nondisturbing_process(b, k, rng), a, b, random_density(d, rng)
    if scenario == "joint":
        a, b = Observable(random_hermitian(d, rng)), Observable(random_hermitian(d, rng))
        return random_joint_model(d, k, rng), a, b, random_density(d, rng)
    if scenario == "joint_binary":
        a, b, rho = _binary_pair_and_state(d, rng)
        return random_joint_model(d, k, rng, binary=True), a, b, rho
    raise ValueError(f"unknown scenario {scenario!r}")
