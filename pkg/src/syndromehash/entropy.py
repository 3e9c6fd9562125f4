"""Hamming-distance statistics, degrees of freedom and pseudomasks for template sets.

Templates are held as a ``(count, length)`` uint8 matrix. Pairwise distances
come from one integer matrix product on +/-1 encodings, so they are exact and
independent of pair order.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .bits import BitVector
from .matrix import LdpcCode, syndrome_bits

FORMAT_TAG = "FTPL1"
DEFAULT_M_TH = 0.024
INTER_MODELS = ("uniform", "blocks")


@dataclass(frozen=True, eq=False)
class TemplateSet:
    bits: np.ndarray  # (count, length) uint8
    labels: tuple
    masks: Optional[np.ndarray] = None  # same shape, 1 = erased

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError("templates must form a (count, length) array")
        if bits.size and bits.max() > 1:
            raise ValueError("template bits must be 0 or 1")
        if len(self.labels) != bits.shape[0]:
            raise ValueError(f"{len(self.labels)} labels for {bits.shape[0]} templates")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.masks is not None:
            masks = np.ascontiguousarray(self.masks, dtype=np.uint8)
            if masks.shape != bits.shape:
                raise ValueError("masks must match the templates in count and length")
            object.__setattr__(self, "masks", masks)

    @classmethod
    def from_vectors(cls, templates: Sequence[BitVector], labels, masks: Optional[Sequence[BitVector]] = None):
        if not templates:
            raise ValueError("empty template list")
        lengths = {t.length for t in templates}
        if len(lengths) != 1:
            raise ValueError("templates differ in length")
        bits = np.stack([t.to_numpy() for t in templates])
        m = None if masks is None else np.stack([x.to_numpy() for x in masks])
        return cls(bits, labels, m)

    @property
    def count(self) -> int:
        return self.bits.shape[0]

    @property
    def length(self) -> int:
        return self.bits.shape[1]

    @property
    def templates(self) -> list[BitVector]:
        return [BitVector.from_bits(row) for row in self.bits]


@dataclass(frozen=True)
class DofReport:
    mu: float
    sigma: float
    dof: float
    pair_count: int


@dataclass(frozen=True)
class Pseudomask:
    kept: tuple[int, ...]
    m: np.ndarray
    m_th: float

    @property
    def indices(self) -> np.ndarray:
        return np.asarray(self.kept, dtype=np.int64)


def dof(mu: float, sigma: float) -> float:
    """Degrees of freedom of a binomial-like distance distribution: mu(1-mu)/sigma^2."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if not 0 < mu < 1:
        raise ValueError("mu must lie in (0, 1)")
    return mu * (1 - mu) / sigma**2


def dof_report(distances) -> DofReport:
    d = np.asarray(distances, dtype=np.float64)
    if d.size < 2:
        raise ValueError("need at least two distances")
    mu = float(d.mean())
    sigma = float(np.sqrt(((d - mu) ** 2).sum() / (d.size - 1)))  # two-pass, Bessel-corrected
    return DofReport(mu, sigma, dof(mu, sigma), int(d.size))


def _pair_mask(labels: tuple, mode: str) -> np.ndarray:
    idx = {x: i for i, x in enumerate(dict.fromkeys(labels))}
    codes = np.array([idx[x] for x in labels], dtype=np.int64)
    same = codes[:, None] == codes[None, :]
    if mode == "intra":
        return same
    if mode == "inter":
        return ~same
    raise ValueError(f"mode must be 'intra' or 'inter', got {mode!r}")


def _distance_matrix(bits: np.ndarray) -> np.ndarray:
    signs = 1.0 - 2.0 * bits.astype(np.float64)
    return (bits.shape[1] - signs @ signs.T) / 2


def pairwise_distances(ts: TemplateSet, mode: str = "inter", pseudomask: Optional[Pseudomask] = None) -> np.ndarray:
    """Normalized Hamming distances of all unordered pairs (i < j) of the given class relation."""
    if ts.count < 2:
        raise ValueError("need at least two templates")
    bits = ts.bits if pseudomask is None else ts.bits[:, pseudomask.indices]
    if bits.shape[1] == 0:
        raise ValueError("pseudomask keeps no positions")
    iu, ju = np.triu_indices(ts.count, k=1)
    sel = _pair_mask(ts.labels, mode)[iu, ju]
    if not sel.any():
        raise ValueError(f"no {mode}-class pairs in the template set")
    d = _distance_matrix(bits)[iu[sel], ju[sel]]
    return np.rint(d) / bits.shape[1]


def pseudomask_from_masks(masks, m_th: float = DEFAULT_M_TH, literal: bool = False) -> Pseudomask:
    """Keep positions with erase frequency at most ``m_th``.

    With ``literal`` set, ``m`` is the non-erase frequency instead, and the
    same ``m <= m_th`` rule then keeps the almost-always-erased positions.
    """
    arr = masks.masks if isinstance(masks, TemplateSet) else masks
    if arr is None:
        raise ValueError("template set has no masks")
    if isinstance(arr, np.ndarray):
        m_arr = np.asarray(arr, dtype=np.uint8)
    else:
        if len(arr) == 0:
            raise ValueError("empty mask list")
        if len({x.length for x in arr}) != 1:
            raise ValueError("masks differ in length")
        m_arr = np.stack([x.to_numpy() for x in arr])
    if m_arr.ndim != 2 or m_arr.shape[0] == 0:
        raise ValueError("empty mask list")
    m = m_arr.mean(axis=0)
    if literal:
        m = 1.0 - m
    kept = tuple(int(i) for i in np.nonzero(m <= m_th)[0])
    return Pseudomask(kept, m, float(m_th))


def transition_probabilities(pairs) -> tuple[float, float]:
    """Empirical (p_1to0, p_0to1) from aligned (reference, probe) pairs."""
    ones = zeros = down = up = 0
    for ref, probe in pairs:
        a = ref.to_numpy() if isinstance(ref, BitVector) else np.asarray(ref, dtype=np.uint8)
        b = probe.to_numpy() if isinstance(probe, BitVector) else np.asarray(probe, dtype=np.uint8)
        if a.shape != b.shape:
            raise ValueError("reference and probe differ in length")
        ones += int(a.sum())
        zeros += int(a.size - a.sum())
        down += int(np.count_nonzero((a == 1) & (b == 0)))
        up += int(np.count_nonzero((a == 0) & (b == 1)))
    if ones == 0:
        raise ValueError("references contain no ones; p_1to0 undefined")
    if zeros == 0:
        raise ValueError("references contain no zeros; p_0to1 undefined")
    return down / ones, up / zeros


def reading_flip_probability(intra_p: float) -> float:
    """Per-reading flip rate q with 2q(1-q) = intra_p, so two readings differ at rate intra_p."""
    if not 0 <= intra_p <= 0.5:
        raise ValueError("intra_p must lie in [0, 0.5]")
    return (1 - math.sqrt(1 - 2 * intra_p)) / 2


def synth_generate(
    subjects: int,
    readings_per_subject: int,
    length: int,
    intra_p: float,
    inter_model: str = "uniform",
    mask_model: Union[None, float, Sequence[float]] = None,
    seed=0,
    block: int = 32,
) -> TemplateSet:
    """Synthetic template set standing in for real biometric readings.

    ``uniform`` draws each subject's base uniformly. ``blocks`` draws
    ``ceil(length / block)`` uniform bits and repeats each over ``block``
    consecutive positions, giving the strong neighbour correlation that keeps
    the degrees of freedom of real templates far below their length. Readings
    flip base bits independently, calibrated so that two readings of one
    subject disagree on a fraction ``intra_p`` of positions.
    """
    if subjects < 1 or readings_per_subject < 1 or length < 1:
        raise ValueError("subjects, readings_per_subject and length must be positive")
    if inter_model not in INTER_MODELS:
        raise ValueError(f"inter_model must be one of {INTER_MODELS}")
    if block < 1:
        raise ValueError("block must be positive")
    q = reading_flip_probability(intra_p)
    rng = np.random.default_rng(seed)

    if inter_model == "uniform":
        bases = rng.integers(0, 2, size=(subjects, length), dtype=np.uint8)
    else:
        latent = rng.integers(0, 2, size=(subjects, -(-length // block)), dtype=np.uint8)
        bases = np.repeat(latent, block, axis=1)[:, :length]

    bits = np.repeat(bases, readings_per_subject, axis=0)
    bits ^= (rng.random(bits.shape) < q).astype(np.uint8)
    labels = tuple(s for s in range(subjects) for _ in range(readings_per_subject))

    masks = None
    if mask_model is not None:
        probs = np.broadcast_to(np.asarray(mask_model, dtype=np.float64), (length,))
        if probs.min() < 0 or probs.max() > 1:
            raise ValueError("erase probabilities must lie in [0, 1]")
        masks = (rng.random(bits.shape) < probs[None, :]).astype(np.uint8)
    return TemplateSet(bits, labels, masks)


def syndrome_set(ts: TemplateSet, code: LdpcCode) -> TemplateSet:
    if ts.length != code.n:
        raise ValueError(f"template length {ts.length} != n={code.n}")
    syn = np.stack([syndrome_bits(code.h, row) for row in ts.bits])
    return TemplateSet(syn, ts.labels)


def syndrome_set_analysis(ts: TemplateSet, code: LdpcCode) -> DofReport:
    """Inter-class DOF of the templates' syndromes."""
    return dof_report(pairwise_distances(syndrome_set(ts, code), "inter"))


def histogram_csv(distances, bins: int = 100) -> str:
    counts, edges = np.histogram(np.asarray(distances, dtype=np.float64), bins=bins, range=(0.0, 1.0))
    out = io.StringIO()
    out.write("bin_low,bin_high,count\n")
    for lo, hi, c in zip(edges[:-1], edges[1:], counts):
        out.write(f"{lo!r},{hi!r},{int(c)}\n")
    return out.getvalue()


# template files ------------------------------------------------------------

def _write_matrix(path: Path, bits: np.ndarray) -> None:
    lines = [f"{FORMAT_TAG} {bits.shape[0]} {bits.shape[1]}"]
    lines += [BitVector.from_bits(row).hex() for row in bits]
    path.write_text("\n".join(lines) + "\n")


def _read_matrix(path: Path) -> np.ndarray:
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty template file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != FORMAT_TAG:
        raise ValueError(f"{path}: header must be '{FORMAT_TAG} <count> <length>'")
    try:
        count, length = int(head[1]), int(head[2])
    except ValueError:
        raise ValueError(f"{path}: count and length must be integers") from None
    body = [ln.strip() for ln in lines[1:] if ln.strip()]
    if len(body) != count:
        raise ValueError(f"{path}: header says {count} templates, found {len(body)}")
    rows = np.zeros((count, length), dtype=np.uint8)
    for i, ln in enumerate(body):
        try:
            rows[i] = BitVector.from_hex(ln, length).to_numpy()
        except ValueError as exc:
            raise ValueError(f"{path}: line {i + 2}: {exc}") from None
    return rows


def write_template_set(ts: TemplateSet, path) -> None:
    """Write ``path``, ``path.labels`` and, when masks exist, ``path.mask``."""
    path = Path(path)
    _write_matrix(path, ts.bits)
    if ts.masks is not None:
        _write_matrix(Path(str(path) + ".mask"), ts.masks)
    Path(str(path) + ".labels").write_text("".join(f"{i} {lab}\n" for i, lab in enumerate(ts.labels)))


def read_template_set(path, mask_path=None, labels_path=None) -> TemplateSet:
    path = Path(path)
    bits = _read_matrix(path)
    mask_path = Path(mask_path) if mask_path else Path(str(path) + ".mask")
    labels_path = Path(labels_path) if labels_path else Path(str(path) + ".labels")
    masks = _read_matrix(mask_path) if mask_path.exists() else None
    if masks is not None and masks.shape != bits.shape:
        raise ValueError(f"{mask_path}: mask layout does not match {path}")
    if labels_path.exists():
        labels = [None] * bits.shape[0]
        for ln in labels_path.read_text().splitlines():
            if not ln.strip():
                continue
            parts = ln.split(maxsplit=1)
            if len(parts) != 2:
                raise ValueError(f"{labels_path}: expected '<index> <subject>' lines")
            i = int(parts[0])
            if not 0 <= i < len(labels):
                raise ValueError(f"{labels_path}: index {i} out of range")
            labels[i] = parts[1].strip()
        if any(lab is None for lab in labels):
            raise ValueError(f"{labels_path}: some templates have no label")
    else:
        labels = [str(i) for i in range(bits.shape[0])]  # every template its own subject
    return TemplateSet(bits, labels, masks)
