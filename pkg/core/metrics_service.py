"""
Evaluation metrics for generated vs. reference populations of 96-slot days.

Sequence similarity (paired by user_id):
- accuracy, f1_score (macro), edit_dist, bleu_score

Temporal alignment / distributional consistency (JSD, log base 2):
- macro_int, micro_int, macro_hour, micro_hour
- data_jsd, act_type, uni_act_type, traj_len
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import Levenshtein
import numpy as np
import pandas as pd
from nltk.translate.bleu_score import sentence_bleu as nltk_sentence_bleu
from scipy.special import rel_entr
from sklearn.metrics import f1_score

from .exceptions import MetricError
from .schedule import ACTIVITY_TYPES, SLOTS_PER_DAY, discretize

logger = logging.getLogger(__name__)

NUM_ACTIVITIES = len(ACTIVITY_TYPES)
BLEU_MAX_ORDER = 4


# ============================================================================
# POPULATION
# ============================================================================

@dataclass(frozen=True)
class Population:
    """N users x 96 slot codes; row i belongs to user_ids[i]."""

    user_ids: tuple
    sequences: np.ndarray

    def __post_init__(self):
        user_ids = tuple(str(user_id) for user_id in self.user_ids)
        sequences = np.asarray(self.sequences, dtype=np.int64).reshape(-1, SLOTS_PER_DAY)
        if len(user_ids) != sequences.shape[0]:
            raise MetricError(f'{len(user_ids)} user ids for {sequences.shape[0]} sequences')
        if len(set(user_ids)) != len(user_ids):
            raise MetricError('Population has duplicate user ids')
        if sequences.size and (sequences.min() < 0 or sequences.max() >= NUM_ACTIVITIES):
            raise MetricError('Slot codes out of range')
        object.__setattr__(self, 'user_ids', user_ids)
        object.__setattr__(self, 'sequences', sequences)

    def __len__(self):
        return len(self.user_ids)

    @classmethod
    def from_slot_sequences(cls, sequences: Mapping) -> 'Population':
        user_ids = list(sequences)
        rows = [sequences[user_id].codes() for user_id in user_ids]
        matrix = np.vstack(rows) if rows else np.empty((0, SLOTS_PER_DAY), dtype=np.int64)
        return cls(tuple(user_ids), matrix)

    @classmethod
    def from_schedules(cls, schedules: Mapping) -> 'Population':
        """Discretize a {user_id: DaySchedule} mapping."""
        return cls.from_slot_sequences({user_id: discretize(s) for user_id, s in schedules.items()})



def paired(gen: Population, ref: Population) -> tuple:
    """Align gen rows to ref's user order; the id sets must match exactly."""
    if set(gen.user_ids) != set(ref.user_ids):
        missing = sorted(set(ref.user_ids) - set(gen.user_ids))
        extra = sorted(set(gen.user_ids) - set(ref.user_ids))
        raise MetricError(f'Paired metrics need matching user ids (missing {missing[:5]}, extra {extra[:5]})')
    if not len(ref):
        raise MetricError('Paired metrics need at least one user')
    order = {user_id: i for i, user_id in enumerate(gen.user_ids)}
    return gen.sequences[[order[user_id] for user_id in ref.user_ids]], ref.sequences


# ============================================================================
# DIVERGENCE
# ============================================================================

def normalize_histogram(counts) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 1:
        counts = counts.ravel()
    if (counts < 0).any():
        raise MetricError('Histogram has negative entries')
    total = counts.sum()
    if total <= 0:
        raise MetricError('Histogram has empty support')
    return counts / total


def jensen_shannon(p, q) -> float:
    """JSD in bits between two histograms over the same support; 0*log(0) = 0."""
    p, q = normalize_histogram(p), normalize_histogram(q)
    if p.shape != q.shape:
        raise MetricError(f'Histogram supports differ: {p.shape} vs {q.shape}')
    m = (p + q) / 2.0
    divergence = (rel_entr(p, m).sum() + rel_entr(q, m).sum()) / 2.0 / math.log(2)
    return float(min(max(divergence, 0.0), 1.0))


# ============================================================================
# EPISODE STATISTICS
# ============================================================================

def run_lengths(row) -> tuple:
    """(activity codes, onset slots, lengths) of the maximal runs in one row."""
    row = np.asarray(row)
    onsets = np.concatenate(([0], np.flatnonzero(np.diff(row)) + 1))
    lengths = np.diff(np.concatenate((onsets, [len(row)])))
    return row[onsets], onsets, lengths


def _episode_histograms(sequences: np.ndarray) -> dict:
    interval = np.zeros((NUM_ACTIVITIES, SLOTS_PER_DAY))
    onset = np.zeros((NUM_ACTIVITIES, SLOTS_PER_DAY))
    episode_counts = np.zeros(SLOTS_PER_DAY)
    for row in sequences:
        activities, onsets, lengths = run_lengths(row)
        np.add.at(interval, (activities, lengths - 1), 1)
        np.add.at(onset, (activities, onsets), 1)
        episode_counts[len(activities) - 1] += 1
    return {
        'interval': interval,
        'onset': onset,
        'episodes_per_user': episode_counts,
    }


def activity_histogram(sequences: np.ndarray) -> np.ndarray:
    return np.bincount(np.asarray(sequences).ravel(), minlength=NUM_ACTIVITIES).astype(np.float64)


def interval_histogram(sequences: np.ndarray) -> np.ndarray:
    """Joint (activity, run length) episode counts, flattened."""
    return _episode_histograms(np.asarray(sequences).reshape(-1, SLOTS_PER_DAY))['interval'].ravel()


def _require_rows(*populations):
    for population in populations:
        if not len(population):
            raise MetricError('Distributional metrics need non-empty populations')


# ============================================================================
# SEQUENCE SIMILARITY
# ============================================================================

def slot_accuracy(gen_rows, ref_rows) -> float:
    return float(np.mean(np.asarray(gen_rows) == np.asarray(ref_rows)))


def slot_macro_f1(gen_rows, ref_rows) -> float:
    """Macro-F1 over the classes present in either side."""
    y_pred = np.asarray(gen_rows).ravel()
    y_true = np.asarray(ref_rows).ravel()
    labels = sorted(set(y_true.tolist()) | set(y_pred.tolist()))
    return float(f1_score(y_true, y_pred, labels=labels, average='macro', zero_division=0))


def _as_text(row) -> str:
    return ''.join(chr(ord('a') + int(code)) for code in row)


def _add_one_smoothing(p_n, hyp_len=0, **kwargs):
    """Zero precisions for n >= 2 become 1 / (hypothesis n-grams + 1)."""
    return [
        Fraction(1, max(1, hyp_len - n + 1) + 1) if n > 1 and precision.numerator == 0 else precision
        for n, precision in enumerate(p_n, start=1)
    ]


def sentence_bleu(hypothesis, reference, max_order: int = BLEU_MAX_ORDER) -> float:
    """Uniform-weight BLEU over slot codes; no unigram overlap scores 0."""
    hypothesis, reference = list(hypothesis), list(reference)
    if not hypothesis:
        return 0.0
    return float(nltk_sentence_bleu(
        [reference],
        hypothesis,
        weights=(1.0 / max_order,) * max_order,
        smoothing_function=_add_one_smoothing,
    ))


def accuracy(gen: Population, ref: Population) -> float:
    return slot_accuracy(*paired(gen, ref))


def macro_f1(gen: Population, ref: Population) -> float:
    return slot_macro_f1(*paired(gen, ref))


def edit_dist(gen: Population, ref: Population) -> float:
    gen_rows, ref_rows = paired(gen, ref)
    distances = [
        Levenshtein.distance(_as_text(g), _as_text(t)) / SLOTS_PER_DAY
        for g, t in zip(gen_rows, ref_rows)
    ]
    return float(np.mean(distances))


def bleu(gen: Population, ref: Population) -> float:
    gen_rows, ref_rows = paired(gen, ref)
    return float(np.mean([sentence_bleu(g.tolist(), t.tolist()) for g, t in zip(gen_rows, ref_rows)]))


# ============================================================================
# DISTRIBUTIONAL METRICS
# ============================================================================

def macro_int(gen: Population, ref: Population) -> float:
    _require_rows(gen, ref)
    return jensen_shannon(_episode_histograms(gen.sequences)['interval'].sum(axis=0),
                          _episode_histograms(ref.sequences)['interval'].sum(axis=0))


def micro_int(gen: Population, ref: Population) -> float:
    _require_rows(gen, ref)
    return jensen_shannon(interval_histogram(gen.sequences), interval_histogram(ref.sequences))


def macro_hour(gen: Population, ref: Population) -> float:
    _require_rows(gen, ref)
    return jensen_shannon(_episode_histograms(gen.sequences)['onset'].sum(axis=0),
                          _episode_histograms(ref.sequences)['onset'].sum(axis=0))


def micro_hour(gen: Population, ref: Population) -> float:
    _require_rows(gen, ref)
    return jensen_shannon(_episode_histograms(gen.sequences)['onset'].ravel(),
                          _episode_histograms(ref.sequences)['onset'].ravel())


def data_jsd(gen: Population, ref: Population) -> float:
    """Each whole day is one token; support is the union of observed days."""
    _require_rows(gen, ref)
    gen_counts = Counter(row.tobytes() for row in gen.sequences)
    ref_counts = Counter(row.tobytes() for row in ref.sequences)
    support = sorted(set(gen_counts) | set(ref_counts))
    return jensen_shannon([gen_counts[key] for key in support], [ref_counts[key] for key in support])


def act_type(gen: Population, ref: Population) -> float:
    _require_rows(gen, ref)
    return jensen_shannon(activity_histogram(gen.sequences), activity_histogram(ref.sequences))


def uni_act_type(gen: Population, ref: Population) -> float:
    _require_rows(gen, ref)
    return jensen_shannon(_episode_histograms(gen.sequences)['interval'].sum(axis=1),
                          _episode_histograms(ref.sequences)['interval'].sum(axis=1))


def traj_len(gen: Population, ref: Population) -> float:
    _require_rows(gen, ref)
    return jensen_shannon(_episode_histograms(gen.sequences)['episodes_per_user'],
                          _episode_histograms(ref.sequences)['episodes_per_user'])


# ============================================================================
# REPORT
# ============================================================================

HIGHER, LOWER = '↑', '↓'

# field -> (table label, direction); the first three lead the table.
METRIC_LABELS = {
    'accuracy': ('Acc', HIGHER),
    'macro_int': ('Mint', LOWER),
    'act_type': ('Atype', LOWER),
    'f1_score': ('F1', HIGHER),
    'edit_dist': ('EditDist', LOWER),
    'bleu_score': ('BLEU', HIGHER),
    'macro_hour': ('MacroHour', LOWER),
    'micro_hour': ('MicroHour', LOWER),
    'micro_int': ('MicroInt', LOWER),
    'data_jsd': ('DataJSD', LOWER),
    'uni_act_type': ('UniActType', LOWER),
    'traj_len': ('TrajLen', LOWER),
}


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    f1_score: float
    edit_dist: float
    bleu_score: float
    macro_hour: float
    micro_hour: float
    micro_int: float
    macro_int: float
    data_jsd: float
    act_type: float
    uni_act_type: float
    traj_len: float

    def to_document(self) -> dict:
        return {
            'metrics': {name: getattr(self, name) for name in METRIC_LABELS},
            'directions': {name: 'higher' if arrow == HIGHER else 'lower'
                           for name, (_, arrow) in METRIC_LABELS.items()},
            'labels': {name: f'{label}{arrow}' for name, (label, arrow) in METRIC_LABELS.items()},
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[getattr(self, name) for name in METRIC_LABELS]],
            columns=[f'{label}{arrow}' for label, arrow in METRIC_LABELS.values()],
        )

    def to_table(self) -> str:
        return self.to_frame().to_string(index=False, float_format=lambda value: f'{value:.4f}')


def evaluate(gen: Population, ref: Population) -> MetricReport:
    """All twelve metrics; raises MetricError if the populations cannot be paired."""
    paired(gen, ref)
    report = MetricReport(
        accuracy=accuracy(gen, ref),
        f1_score=macro_f1(gen, ref),
        edit_dist=edit_dist(gen, ref),
        bleu_score=bleu(gen, ref),
        macro_hour=macro_hour(gen, ref),
        micro_hour=micro_hour(gen, ref),
        micro_int=micro_int(gen, ref),
        macro_int=macro_int(gen, ref),
        data_jsd=data_jsd(gen, ref),
        act_type=act_type(gen, ref),
        uni_act_type=uni_act_type(gen, ref),
        traj_len=traj_len(gen, ref),
    )
    logger.info(f'Evaluated {len(gen)} users: Acc={report.accuracy:.4f} '
                f'Mint={report.macro_int:.4f} Atype={report.act_type:.4f}')
    return report
