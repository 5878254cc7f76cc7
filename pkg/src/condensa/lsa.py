"""Per-document latent semantic analysis.

The term-sentence matrix of a document is decomposed with a one-sided
(Hestenes) Jacobi SVD, truncated by an energy criterion, and sentences are
compared by cosine in the reduced space ``diag(S_q) @ Vt_q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analyzer import Document
from .errors import ConfigError, DegenerateDocumentError, NoConvergenceError, SentenceIndexError
from .similarity import SentenceVector, sentence_vectors

MAX_SWEEPS = 100
ROTATION_TOL = 1e-12


def _complete_orthonormal(u: np.ndarray, good: np.ndarray) -> np.ndarray:
    """Replace the columns of ``u`` not flagged in ``good`` with an orthonormal completion."""
    n_rows, n_cols = u.shape
    basis = [u[:, k] for k in range(n_cols) if good[k]]
    out = u.copy()
    for k in range(n_cols):
        if good[k]:
            continue
        # project every unit vector off the current basis and keep the largest remainder;
        # some e_i always keeps at least sqrt((n - len(basis)) / n) of its length
        residual = np.eye(n_rows)
        for _ in range(2):
            for b in basis:
                residual -= np.outer(b, b @ residual)
        lengths = np.linalg.norm(residual, axis=0)
        best = int(np.argmax(lengths))
        e = residual[:, best] / lengths[best]
        basis.append(e)
        out[:, k] = e
    return out


def svd(a, tol: float = ROTATION_TOL, max_sweeps: int = MAX_SWEEPS):
    """Thin SVD ``a = U @ diag(S) @ Vt`` by one-sided Jacobi rotations.

    Returns ``(U, S, Vt)`` with shapes ``(t, r)``, ``(r,)``, ``(r, m)`` where
    ``r = min(t, m)``.  Singular values come out non-increasing.  A column
    pair is rotated while ``|a_p . a_q| > tol * |a_p| |a_q|``; raises
    NoConvergenceError if a sweep still rotates after ``max_sweeps`` sweeps.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"svd needs a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("svd input contains non-finite entries")

    n_rows, n_cols = a.shape
    if n_cols > n_rows:
        u, s, vt = svd(a.T, tol=tol, max_sweeps=max_sweeps)
        return vt.T, s, u.T

    work = a
    v = np.eye(n_cols)
    fro = np.linalg.norm(work)
    # columns below this length are numerically zero and never rotated
    negligible = (np.finfo(float).eps * fro) ** 2

    for _ in range(max_sweeps):
        rotated = False
        for p in range(n_cols - 1):
            for q in range(p + 1, n_cols):
                ap = work[:, p]
                aq = work[:, q]
                alpha = ap @ ap
                beta = aq @ aq
                gamma = ap @ aq
                if alpha <= negligible or beta <= negligible:
                    continue
                if abs(gamma) <= tol * math.sqrt(alpha * beta):
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                work[:, [p, q]] = np.column_stack((c * ap - s * aq, s * ap + c * aq))
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
                rotated = True
        if not rotated:
            break
    else:
        raise NoConvergenceError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")

    norms = np.linalg.norm(work, axis=0)
    order = np.argsort(-norms, kind="stable")
    sing = norms[order]
    work = work[:, order]
    v = v[:, order]

    cutoff = max(n_rows, n_cols) * np.finfo(float).eps * (sing[0] if sing.size else 0.0)
    good = sing > cutoff
    u = np.zeros_like(work)
    u[:, good] = work[:, good] / sing[good]
    if not good.all():
        u = _complete_orthonormal(u, good)
    return u, sing, v.T


@dataclass(frozen=True)
class TermSentenceMatrix:
    terms: tuple[str, ...]
    matrix: np.ndarray  # (n_terms, n_sentences)


@dataclass(frozen=True)
class LsaSpace:
    terms: tuple[str, ...]
    singular_values: np.ndarray
    right_vectors: np.ndarray  # Vt, (r, n_sentences)
    rank_q: int
    sentence_reps: np.ndarray  # diag(S[:q]) @ Vt[:q], (q, n_sentences)

    @property
    def n_sentences(self) -> int:
        return self.sentence_reps.shape[1]


def term_sentence_matrix(doc: Document, vectors: list[SentenceVector] | None = None) -> TermSentenceMatrix:
    if vectors is None:
        vectors = sentence_vectors(doc)
    vocab = sorted({t for vec in vectors for t in vec})
    row = {t: i for i, t in enumerate(vocab)}
    mat = np.zeros((len(vocab), len(vectors)))
    for j, vec in enumerate(vectors):
        for t, w in vec.items():
            mat[row[t], j] = w
    return TermSentenceMatrix(tuple(vocab), mat)


def retained_rank(singular_values, energy: float) -> int:
    """Smallest q whose leading squared singular values hold ``energy`` of the total.

    Never below 2 when at least two singular values exist; ``energy >= 1``
    keeps everything.
    """
    if not 0.0 < energy <= 1.0:
        raise ConfigError(f"energy must lie in (0, 1], got {energy}")
    s = np.asarray(singular_values, dtype=float)
    r = s.size
    if r == 0:
        return 0
    if energy >= 1.0:
        return r
    cum = np.cumsum(s * s)
    q = int(np.searchsorted(cum, energy * cum[-1], side="left")) + 1
    return max(min(q, r), min(2, r))


def build_lsa_space(doc: Document, energy: float = 0.9,
                    vectors: list[SentenceVector] | None = None) -> LsaSpace:
    if sum(1 for s in doc.sentences if s.terms) < 2:
        raise DegenerateDocumentError(f"{doc.doc_id}: fewer than 2 sentences with terms")
    tsm = term_sentence_matrix(doc, vectors)
    if not tsm.terms:
        raise DegenerateDocumentError(f"{doc.doc_id}: no term carries sentence-level weight")
    _, sing, vt = svd(tsm.matrix)
    q = retained_rank(sing, energy)
    reps = sing[:q, None] * vt[:q]
    return LsaSpace(tsm.terms, sing, vt, q, reps)


def lsa_similarity(space: LsaSpace, i: int, j: int) -> float:
    """Reduced-space cosine of sentences i and j, clamped to [0, 1]."""
    n = space.n_sentences
    for k in (i, j):
        if not 0 <= k < n:
            raise SentenceIndexError(f"sentence index {k} outside 0..{n - 1}")
    x = space.sentence_reps[:, i]
    y = space.sentence_reps[:, j]
    nx = float(np.linalg.norm(x))
    ny = float(np.linalg.norm(y))
    if nx == 0.0 or ny == 0.0:
        return 0.0
    return min(1.0, max(0.0, float(x @ y) / (nx * ny)))
