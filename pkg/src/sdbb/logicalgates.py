"""Transversal CNOT, H and S on self-dual CSS codes.

Paulis are ``i**p X^x Z^z``. Single-qubit rules per site::

    H:  X -> Z,  Z -> X          (a|b) -> (b|a),     phase += 2 a.b
    S:  X -> iXZ, Z -> Z         (a|b) -> (a|a^b),   phase += wt(a)
    CNOT (A controls B):
        X_A -> X_A X_B, Z_B -> Z_A Z_B               no phase

Logical coordinates of an operator ``P`` that commutes with the checks are
``c_j = <P, Zbar_j>`` and ``e_j = <P, Xbar_j>`` (symplectic products), and
``P = i**phi * Xbar^c Zbar^e * s`` for a stabilizer ``s`` of phase 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from sdbb import gf2
from sdbb.codebuilder import CssCode, LogicalBasis, PauliVector, doubly_even_check, logical_basis

log = logging.getLogger(__name__)

GATES = ("CNOT", "H", "S")


class GateNotPreservedError(ValueError):
    """The transversal gate does not map the stabilizer group to itself."""


# ----------------------------------------------------------------------------
# physical conjugation


def _conj_h(p: PauliVector) -> PauliVector:
    overlap = int(p.x_part.astype(np.int64) @ p.z_part.astype(np.int64))
    return PauliVector(p.z_part, p.x_part, p.phase + 2 * overlap)


def _conj_s(p: PauliVector) -> PauliVector:
    return PauliVector(p.x_part, p.x_part ^ p.z_part, p.phase + int(p.x_part.sum()))


def _conj_cnot(a: PauliVector, b: PauliVector) -> tuple[PauliVector, PauliVector]:
    # the overall phase rides on the control block
    return (
        PauliVector(a.x_part, a.z_part ^ b.z_part, a.phase + b.phase),
        PauliVector(a.x_part ^ b.x_part, b.z_part, 0),
    )


def conjugate_by_transversal(gate: str, p, code: CssCode):
    """Image of ``p`` under the transversal gate; ``p`` is a pair for CNOT."""
    if gate == "CNOT":
        a, b = p
        if a.n != code.n or b.n != code.n:
            raise ValueError(f"CNOT needs two Paulis of length {code.n}")
        return _conj_cnot(a, b)
    if p.n != code.n:
        raise ValueError(f"Pauli has length {p.n}, code has {code.n} qubits")
    if gate == "H":
        return _conj_h(p)
    if gate == "S":
        return _conj_s(p)
    raise ValueError(f"unknown gate {gate!r}; expected one of {GATES}")


# ----------------------------------------------------------------------------
# stabilizer preservation


@dataclass
class PreservationReport:
    gate: str
    preserved: bool
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.preserved


def _generator_images(gate: str, code: CssCode):
    """Yield ``(block, sector, row, image)`` with image on the (doubled) register."""
    n = code.n
    zero = np.zeros(n, dtype=np.uint8)
    gens = [("X", i, PauliVector.x_type(r)) for i, r in enumerate(code.h_x)]
    gens += [("Z", i, PauliVector.z_type(r)) for i, r in enumerate(code.h_z)]
    for sector, row, g in gens:
        if gate == "CNOT":
            idle = PauliVector(zero, zero)
            for block, pair in (("A", (g, idle)), ("B", (idle, g))):
                a, b = _conj_cnot(*pair)
                yield block, sector, row, a, b
        else:
            yield None, sector, row, conjugate_by_transversal(gate, g, code), None


def _stabilizer_phase_ok(code: CssCode, p: PauliVector) -> str | None:
    """``None`` if ``p`` is a stabilizer with phase +1, else the reason."""
    if not (gf2.in_rowspace(code.h_x, p.x_part) and gf2.in_rowspace(code.h_z, p.z_part)):
        return "outside stabilizer group"
    # X(x) Z(z) with phase 0 is the group element with these supports
    if p.phase != 0:
        return "phase"
    return None


def stabilizer_preserved(gate: str, code: CssCode) -> PreservationReport:
    """Check every generator image; report the first offending row."""
    if gate not in GATES:
        raise ValueError(f"unknown gate {gate!r}; expected one of {GATES}")
    for block, sector, row, a, b in _generator_images(gate, code):
        parts = [("A", a), ("B", b)] if b is not None else [(None, a)]
        for where, p in parts:
            reason = _stabilizer_phase_ok(code, p)
            if reason is None:
                continue
            source = code.h_x if sector == "X" else code.h_z
            return PreservationReport(
                gate,
                False,
                {
                    "block": block,
                    "image_block": where,
                    "sector": sector,
                    "row": row,
                    "support": [int(i) for i in np.flatnonzero(source[row])],
                    "weight": int(source[row].sum()),
                    "phase": p.phase,
                    "sign": {0: "+1", 1: "+i", 2: "-1", 3: "-i"}[p.phase],
                    "reason": reason,
                },
            )
    return PreservationReport(gate, True)


# ----------------------------------------------------------------------------
# logical Cliffords


def _omega(k: int) -> np.ndarray:
    z = np.zeros((k, k), dtype=np.uint8)
    i = np.eye(k, dtype=np.uint8)
    return np.block([[z, i], [i, z]])


def is_symplectic(m: np.ndarray) -> bool:
    m = gf2.as_bits(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        return False
    om = _omega(m.shape[0] // 2)
    return bool(np.array_equal(gf2.matmul(gf2.matmul(m.T, om), m), om))


@dataclass
class LogicalClifford:
    """Columns of ``symplectic`` are the (X|Z) coordinates of the images of
    ``Xbar_0..Xbar_{k-1}, Zbar_0..Zbar_{k-1}``; ``phases[j]`` is the power
    of ``i`` in front of ``Xbar^c Zbar^e`` for image ``j``.
    """

    symplectic: np.ndarray
    phases: np.ndarray
    label: str = ""
    matches_paper: bool | None = None
    expected: "LogicalClifford | None" = field(default=None, repr=False)

    def __post_init__(self):
        self.symplectic = gf2.as_bits(self.symplectic)
        self.phases = np.asarray(self.phases, dtype=np.int64) % 4

    @property
    def k(self) -> int:
        return self.symplectic.shape[0] // 2

    @classmethod
    def identity(cls, k: int) -> "LogicalClifford":
        return cls(np.eye(2 * k, dtype=np.uint8), np.zeros(2 * k, dtype=np.int64), "I")

    def image(self, j: int) -> PauliVector:
        col = self.symplectic[:, j]
        return PauliVector(col[: self.k], col[self.k :], int(self.phases[j]))

    def apply(self, p: PauliVector) -> PauliVector:
        """Image of a logical Pauli ``i**p Xbar^c Zbar^e``."""
        if p.n != self.k:
            raise ValueError(f"logical Pauli must have {self.k} qubits")
        zero = np.zeros(self.k, dtype=np.uint8)
        out = PauliVector(zero, zero, p.phase)
        for j in np.flatnonzero(p.x_part):
            out = out * self.image(int(j))
        for j in np.flatnonzero(p.z_part):
            out = out * self.image(self.k + int(j))
        return out

    def compose(self, other: "LogicalClifford") -> "LogicalClifford":
        """``self`` after ``other``."""
        if other.k != self.k:
            raise ValueError("logical dimensions differ")
        cols, phases = [], []
        for j in range(2 * self.k):
            img = self.apply(other.image(j))
            cols.append(np.concatenate([img.x_part, img.z_part]))
            phases.append(img.phase)
        return LogicalClifford(np.array(cols, dtype=np.uint8).T, phases, f"{self.label}*{other.label}")

    def power(self, e: int) -> "LogicalClifford":
        out = LogicalClifford.identity(self.k)
        for _ in range(e):
            out = self.compose(out)
        return out

    def same_action(self, other: "LogicalClifford") -> bool:
        return bool(np.array_equal(self.symplectic, other.symplectic) and np.array_equal(self.phases, other.phases))

    def is_valid(self) -> bool:
        """Symplectic, and every image Hermitian (phase parity = c.e)."""
        if not is_symplectic(self.symplectic):
            return False
        for j in range(2 * self.k):
            img = self.image(j)
            if (img.phase - int(img.x_part.astype(np.int64) @ img.z_part)) % 2:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "symplectic": self.symplectic.tolist(),
            "phases": self.phases.tolist(),
            "matches_paper": self.matches_paper,
        }


def stated_action(gate: str, k: int) -> LogicalClifford:
    """The canonical action: H swaps Xbar_j/Zbar_j, S sends Xbar_j to
    Ybar_j = i Xbar_j Zbar_j, CNOT acts pairwise between two blocks."""
    i = np.eye(k, dtype=np.uint8)
    z = np.zeros((k, k), dtype=np.uint8)
    if gate == "H":
        return LogicalClifford(np.block([[z, i], [i, z]]), np.zeros(2 * k), "H")
    if gate == "S":
        return LogicalClifford(np.block([[i, z], [i, i]]), np.r_[np.ones(k), np.zeros(k)], "S")
    if gate == "CNOT":
        # logical order: Xbar^A, Xbar^B, Zbar^A, Zbar^B
        x_block = np.block([[i, z], [i, i]])
        z_block = np.block([[i, i], [z, i]])
        zz = np.zeros((2 * k, 2 * k), dtype=np.uint8)
        return LogicalClifford(np.block([[x_block, zz], [zz, z_block]]), np.zeros(4 * k), "CNOT")
    raise ValueError(f"unknown gate {gate!r}")


def _doubled(code: CssCode, basis: LogicalBasis):
    """Checks and logicals of two copies of the code, blocks side by side."""
    def diag(m):
        z = np.zeros_like(m)
        return np.block([[m, z], [z, m]])

    return diag(code.h_x), diag(code.h_z), diag(basis.l_x), diag(basis.l_z)


def _decompose(p: PauliVector, h_x, h_z, l_x, l_z) -> tuple[np.ndarray, int]:
    """Logical coordinates ``(c|e)`` and phase of ``p`` (stabilizer part dropped)."""
    c = gf2.matmul(l_z, p.x_part)
    e = gf2.matmul(l_x, p.z_part)
    if gf2.matmul(h_z, p.x_part).any() or gf2.matmul(h_x, p.z_part).any():
        raise AssertionError("image does not commute with the checks")
    q = PauliVector(gf2.matmul(c, l_x), gf2.matmul(e, l_z), 0)
    q_inv = PauliVector(q.x_part, q.z_part, 2 * int(q.x_part.astype(np.int64) @ q.z_part))
    rest = q_inv * p
    if not (gf2.in_rowspace(h_x, rest.x_part) and gf2.in_rowspace(h_z, rest.z_part)):
        raise AssertionError("residual is not a stabilizer")
    if rest.x_part.any() or rest.z_part.any():
        log.debug("discarding stabilizer component of weight %d", int((rest.x_part | rest.z_part).sum()))
    return np.concatenate([c, e]), rest.phase


def induced_logical_action(gate: str, code: CssCode, basis: LogicalBasis | None = None) -> LogicalClifford:
    """Logical Clifford implemented by the transversal gate.

    For CNOT the logical register is two copies of the code's logical qubits,
    ordered ``Xbar^A, Xbar^B, Zbar^A, Zbar^B``. ``matches_paper`` records
    whether the computed action (matrix and phases) equals the canonical one.
    """
    report = stabilizer_preserved(gate, code)
    if not report:
        raise GateNotPreservedError(f"{gate} does not preserve the stabilizer: {report.counterexample}")
    basis = logical_basis(code) if basis is None else basis
    k, n = basis.k, code.n
    if gate == "CNOT":
        h_x, h_z, l_x, l_z = _doubled(code, basis)
        kk = 2 * k
    else:
        h_x, h_z, l_x, l_z = code.h_x, code.h_z, basis.l_x, basis.l_z
        kk = k
    cols, phases = [], []
    inputs = [PauliVector.x_type(r) for r in l_x] + [PauliVector.z_type(r) for r in l_z]
    for p in inputs:
        if gate == "CNOT":
            a, b = (PauliVector(p.x_part[s], p.z_part[s], 0) for s in (slice(0, n), slice(n, 2 * n)))
            ia, ib = _conj_cnot(a, b)
            img = PauliVector(np.r_[ia.x_part, ib.x_part], np.r_[ia.z_part, ib.z_part], ia.phase + ib.phase)
        else:
            img = conjugate_by_transversal(gate, p, code)
        coords, phase = _decompose(img, h_x, h_z, l_x, l_z)
        cols.append(coords)
        phases.append(phase)
    action = LogicalClifford(np.array(cols, dtype=np.uint8).T, phases, gate)
    if not action.is_valid():
        raise AssertionError(f"induced {gate} action is not a valid Clifford")
    expected = stated_action(gate, k)
    assert expected.k == kk
    action.expected = expected
    action.matches_paper = action.same_action(expected)
    return action


def gate_report(code: CssCode, basis: LogicalBasis | None = None) -> dict:
    """Summary used by the ``verify-gates`` command."""
    de = doubly_even_check(code)
    out = {"self_dual": code.self_dual, "doubly_even": de.condition_holds, "gates": {}}
    if basis is None:
        try:
            basis = logical_basis(code)
        except ValueError:  # k = 0
            pass
    for gate in GATES:
        rep = stabilizer_preserved(gate, code)
        entry = {"preserved": rep.preserved, "counterexample": rep.counterexample, "action": None, "matches_paper": None}
        if rep and basis is not None:
            act = induced_logical_action(gate, code, basis)
            entry["action"] = {"symplectic": act.symplectic.tolist(), "phases": act.phases.tolist()}
            entry["matches_paper"] = act.matches_paper
        out["gates"][gate] = entry
    out["residual_form"] = None if basis is None else {
        "kind": basis.form_kind,
        "matrix": basis.residual_form.tolist(),
    }
    return out


__all__ = [
    "GATES",
    "GateNotPreservedError",
    "LogicalClifford",
    "PreservationReport",
    "conjugate_by_transversal",
    "gate_report",
    "induced_logical_action",
    "is_symplectic",
    "stabilizer_preserved",
    "stated_action",
]
