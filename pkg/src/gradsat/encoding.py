"""Differentiable clause encoding.

Variables are relaxed to reals ``x``. The clause activations are
``f = tanh(x) @ W`` where ``W`` is the signed n-by-m variable/clause incidence
matrix. A clause is falsified by the Boolean projection of ``x`` exactly when
the sign vector of that projection hits ``s_j = -len(c_j)`` on its column.
The loss is the mean squared activation over falsified clauses only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .formula import CompiledFormula


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    """Sparse signed incidence of variables in clauses, plus ``s``.

    ``by_clause`` is the m-by-n CSR view (row j lists the literals of clause j)
    used by the forward pass and the mask; ``by_var`` is the n-by-m CSR view
    (row i lists the clauses containing variable i) used by the gradient.
    Entries are +1 for a positive literal and -1 for a negated one.
    """

    n: int
    m: int
    by_clause: sp.csr_matrix
    by_var: sp.csr_matrix
    s: np.ndarray

    @property
    def nnz(self) -> int:
        return self.by_clause.nnz

    @property
    def free_vars(self) -> np.ndarray:
        """Mask of variables that occur in no active clause."""
        return np.diff(self.by_var.indptr) == 0

    def toarray(self) -> np.ndarray:
        """Dense n-by-m ``W``; for inspection and small tests only."""
        return self.by_var.toarray()

    def astype(self, dtype) -> "IncidenceMatrix":
        return IncidenceMatrix(
            self.n, self.m, self.by_clause.astype(dtype), self.by_var.astype(dtype), self.s
        )


@dataclass(frozen=True, eq=False)
class Activation:
    f: np.ndarray  # clause activations, length m
    t: np.ndarray  # tanh(x), length n


def build_incidence(cf: CompiledFormula, dtype=np.float64) -> IncidenceMatrix:
    n, m = cf.num_vars, cf.num_active
    lengths = np.fromiter((len(c) for c in cf.active_clauses), dtype=np.int64, count=m)
    nnz = int(lengths.sum())
    lits = np.fromiter((lit for c in cf.active_clauses for lit in c), dtype=np.int64, count=nnz)
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(lengths, out=indptr[1:])
    cols = np.abs(lits) - 1
    vals = np.sign(lits).astype(dtype)
    by_clause = sp.csr_matrix((vals, cols, indptr), shape=(m, n))
    by_clause.sort_indices()
    by_var = by_clause.T.tocsr()
    by_var.sort_indices()
    return IncidenceMatrix(n, m, by_clause, by_var, -lengths)


def _check_x(W: IncidenceMatrix, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (W.n,):
        raise ValueError(f"x must have shape ({W.n},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x contains non-finite values")
    return x


def forward(W: IncidenceMatrix, x) -> Activation:
    x = _check_x(W, x)
    t = np.tanh(x)
    return Activation(W.by_clause @ t, t)


def project(x) -> np.ndarray:
    """Boolean assignment from a relaxed vector: true iff ``x_i > 0``."""
    return np.asarray(x) > 0


def unsat_mask(W: IncidenceMatrix, a) -> np.ndarray:
    """Falsified-clause mask via the incidence identity ``sign(a) @ W == s``.

    ``a`` is read as +1 for true and -1 for false, so every falsified literal
    contributes -1 to its column and the sum equals ``-len(c_j)`` only when
    all literals of clause j are falsified. Partial sums are small integers,
    hence exact in floating point.
    """
    a = np.asarray(a, dtype=bool)
    if a.shape != (W.n,):
        raise ValueError(f"assignment must have shape ({W.n},), got {a.shape}")
    signs = np.where(a, 1.0, -1.0).astype(W.by_clause.dtype)
    return (W.by_clause @ signs) == W.s


def unsat_mask_scan(W: IncidenceMatrix, a) -> np.ndarray:
    """Falsified-clause mask by scanning literals: a clause with any true literal is satisfied."""
    a = np.asarray(a, dtype=bool)
    if a.shape != (W.n,):
        raise ValueError(f"assignment must have shape ({W.n},), got {a.shape}")
    cl = W.by_clause
    lit_true = a[cl.indices] == (cl.data > 0)
    clause_of = np.repeat(np.arange(W.m), np.diff(cl.indptr))
    satisfied = np.zeros(W.m, dtype=bool)
    satisfied[clause_of[lit_true]] = True
    return ~satisfied


def loss_and_grad(W: IncidenceMatrix, act: Activation, mask) -> tuple[float, np.ndarray]:
    """Masked MSE of the activations against zero, and its gradient w.r.t. ``x``.

    With ``U`` the falsified clauses, ``loss = mean_{j in U} f_j**2`` and
    ``grad_i = (1 - t_i**2) * 2/|U| * sum_{j in U} f_j W_ij``. The mask is
    treated as a constant.
    """
    mask = np.asarray(mask, dtype=bool)
    k = int(np.count_nonzero(mask))
    if k == 0:
        return 0.0, np.zeros_like(act.t)
    fu = np.where(mask, act.f, 0.0)
    loss = float(fu @ fu) / k
    grad = (W.by_var @ fu) * ((2.0 / k) * (1.0 - act.t * act.t))
    return loss, grad
