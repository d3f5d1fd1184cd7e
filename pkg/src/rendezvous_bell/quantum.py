"""Finite-dimensional quantum strategies: a shared state and one POVM per setting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numkit.config import DEFAULT
from .numkit.eig import hermitian_eig


class StrategyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuantumStrategy:
    """``povms_a[x, a]`` is Alice's element for outcome ``a`` at setting ``x`` (0-based).

    ``state`` is either a unit vector of length ``d_a * d_b`` or a density
    matrix on that space.
    """

    d_a: int
    d_b: int
    state: np.ndarray
    povms_a: np.ndarray
    povms_b: np.ndarray

    def __post_init__(self):
        for name in ("state", "povms_a", "povms_b"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.complex128))
        D = self.d_a * self.d_b
        if self.state.shape not in ((D,), (D, D)):
            raise StrategyError(f"state shape {self.state.shape} incompatible with {self.d_a}x{self.d_b}")
        for name, d in (("povms_a", self.d_a), ("povms_b", self.d_b)):
            arr = getattr(self, name)
            if arr.ndim != 4 or arr.shape[2:] != (d, d):
                raise StrategyError(f"{name} must have shape (settings, outcomes, {d}, {d})")

    @property
    def is_pure(self) -> bool:
        return self.state.ndim == 1

    @property
    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.state, self.state.conj())
        return self.state

    def validate(self, tol=DEFAULT) -> None:
        """Raise :class:`StrategyError` if the state or any POVM is malformed."""
        rho = self.density
        tr = np.trace(rho).real
        if abs(tr - 1.0) > tol.state_trace * max(1, rho.shape[0]) * 10:
            raise StrategyError(f"state trace {tr!r} != 1")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise StrategyError("state is not Hermitian")
        if not self.is_pure and hermitian_eig(rho)[0][0] < tol.psd_eig:
            raise StrategyError("state is not PSD")
        for name, d in (("A", self.d_a), ("B", self.d_b)):
            arr = self.povms_a if name == "A" else self.povms_b
            for x in range(arr.shape[0]):
                dev = np.max(np.abs(arr[x].sum(axis=0) - np.eye(d)))
                if dev > tol.povm_sum:
                    raise StrategyError(f"party {name} setting {x + 1}: POVM sums to identity only up to {dev:.2e}")
                w, _ = hermitian_eig(0.5 * (arr[x] + np.swapaxes(arr[x], -1, -2).conj()))
                if w.min() < tol.psd_eig:
                    raise StrategyError(f"party {name} setting {x + 1}: element with eigenvalue {w.min():.2e}")

    def with_state(self, state) -> "QuantumStrategy":
        return QuantumStrategy(self.d_a, self.d_b, state, self.povms_a, self.povms_b)

    def schmidt_coefficients(self) -> np.ndarray:
        if not self.is_pure:
            raise StrategyError("Schmidt decomposition needs a pure state")
        return np.linalg.svd(self.state.reshape(self.d_a, self.d_b), compute_uv=False)

    def to_dict(self) -> dict:
        def cx(a):
            return {"re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist(), "shape": list(a.shape)}
        return {"d_a": self.d_a, "d_b": self.d_b, "state": cx(self.state),
                "povms_a": cx(self.povms_a), "povms_b": cx(self.povms_b)}

    @classmethod
    def from_dict(cls, d: dict) -> "QuantumStrategy":
        def cx(v):
            return (np.asarray(v["re"]) + 1j * np.asarray(v["im"])).reshape(v["shape"])
        return cls(d["d_a"], d["d_b"], cx(d["state"]), cx(d["povms_a"]), cx(d["povms_b"]))


def classical_embedding(alice, bob, n_outcomes: int, d_a: int, d_b: int) -> QuantumStrategy:
    """Deterministic strategies (1-based outcomes per setting) as trivial POVMs."""
    def povms(outs, d):
        outs = getattr(outs, "outcomes", outs)
        arr = np.zeros((len(outs), n_outcomes, d, d), dtype=np.complex128)
        for x, o in enumerate(outs):
            arr[x, o - 1] = np.eye(d)
        return arr
    state = np.zeros(d_a * d_b, dtype=np.complex128)
    state[0] = 1.0
    return QuantumStrategy(d_a, d_b, state, povms(alice, d_a), povms(bob, d_b))


def maximally_entangled(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128).ravel() / np.sqrt(d)
