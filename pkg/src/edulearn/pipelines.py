"""End-to-end applications: the learning-style classifier (65% tally rule,
session aggregation, beginner/advanced staging) and the academic-risk case
study, runnable on synthetic generators or an external CSV.

Both synthetic generators are planted models: the ground-truth parameters
are fixed constants in this module, which makes Bayes-optimal oracles
computable in tests. Planted values are test fixtures, not claims about
real classrooms.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from importlib import resources

import numpy as np

from . import data as data_mod
from .classify import (
    MetricsReport,
    OptimizerConfig,
    compute_metrics,
    predict,
    train_logistic,
)
from .data import ColumnSchema, Dataset, ScalerParams, SplitSpec, fit_scaler, transform
from .errors import DimensionError, ParameterError
from .numcore import DenseMatrix

__all__ = [
    "StyleLabel",
    "StageLabel",
    "StyleSession",
    "StyleGenConfig",
    "ClassSummary",
    "CaseStudyReport",
    "FitBundle",
    "SyntheticSource",
    "CsvSource",
    "generate_style_sessions",
    "style_ratio_label",
    "aggregate_sessions",
    "route_learner_stage",
    "class_level_summary",
    "style_schema",
    "fit_dataset",
    "build_style_dataset",
    "collapse_score_columns",
    "run_style_experiment",
    "fit_style_experiment",
    "academic_schema",
    "generate_academic_synthetic",
    "academic_bayes_predict",
    "academic_csv_rows",
    "academic_defaults",
    "run_academic_case_study",
    "fit_academic_case_study",
]


class StyleLabel(IntEnum):
    """Binary learning style: auditory is 0, visual is 1."""

    AUDITORY = 0
    VISUAL = 1


class StageLabel(Enum):
    BEGINNER = "beginner"
    ADVANCED = "advanced"


STYLE_CLASS_NAMES = ("auditory", "visual")
STYLE_FEATURE_NAMES = (
    "score_diff",
    "comprehension_time",
    "prior_preferred_style",
    "time_of_day",
    "instructor_score",
    "lesson_duration",
)

# planted style generator: assessment score means for the matching and
# non-matching modality, and the chance that a student's past preference
# agrees with their latent style
_MATCH_MEAN = 80.0
_OTHER_MEAN = 55.0
_PRIOR_MATCH_PROB = 0.8


@dataclass(frozen=True)
class StyleSession:
    """One assessment session for one student."""

    student_id: str
    instructor_id: str
    day: int
    visual_score: float
    auditory_score: float
    comprehension_time: float
    prior_preferred_style: int
    time_of_day: float
    instructor_score: float
    lesson_duration: float

    def __post_init__(self):
        if not (0.0 <= self.visual_score <= 100.0 and 0.0 <= self.auditory_score <= 100.0):
            raise ParameterError("assessment scores must lie in [0, 100]")
        if self.comprehension_time <= 0.0 or self.lesson_duration <= 0.0:
            raise ParameterError("durations must be positive")
        if self.prior_preferred_style not in (0, 1):
            raise ParameterError("prior_preferred_style must be 0 or 1")
        if not (0.0 <= self.time_of_day < 24.0):
            raise ParameterError("time_of_day must lie in [0, 24)")
        if not (0.0 <= self.instructor_score <= 10.0):
            raise ParameterError("instructor_score must lie in [0, 10]")


@dataclass(frozen=True)
class StyleGenConfig:
    """Synthetic classroom configuration for the style generator."""

    n_students: int = 200
    sessions_per_student: int = 3
    visual_fraction: float = 0.5
    noise_std: float = 8.0
    seed: int = 0

    def __post_init__(self):
        if self.n_students < 1 or self.sessions_per_student < 1:
            raise ParameterError("counts must be >= 1")
        if not (0.0 <= self.visual_fraction <= 1.0):
            raise ParameterError("visual_fraction must lie in [0, 1]")
        if self.noise_std < 0.0:
            raise ParameterError("noise_std must be >= 0")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")


@dataclass(frozen=True)
class ClassSummary:
    beginner_fraction: float
    advanced_fraction: float
    recommendation: str


@dataclass(frozen=True)
class CaseStudyReport:
    """Train/test metrics plus the training class distribution for one run."""

    solver: str
    train_metrics: MetricsReport
    test_metrics: MetricsReport
    class_distribution: dict[str, int]
    config_echo: OptimizerConfig
    data_source: str


@dataclass(frozen=True)
class FitBundle:
    """Everything needed to serialize and later apply a trained pipeline."""

    model: object
    scaler: ScalerParams
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]
    task: str
    schema: tuple[ColumnSchema, ...] | None


def generate_style_sessions(cfg: StyleGenConfig) -> list[tuple[StyleSession, StyleLabel]]:
    """Seeded synthetic sessions with a planted latent style per student.

    The matching-modality assessment score is drawn around 80, the other
    around 55 (Gaussian noise, clamped to [0, 100]). Remaining predictors:
    comprehension time ~ U(10, 60) min, prior preferred style agrees with
    the latent style with probability 0.8, time of day ~ U(8, 16), instructor
    score ~ U(3, 10), lesson duration ~ U(30, 90) min.
    """
    rng = np.random.default_rng(cfg.seed)
    out: list[tuple[StyleSession, StyleLabel]] = []
    for i in range(cfg.n_students):
        latent = StyleLabel.VISUAL if rng.random() < cfg.visual_fraction else StyleLabel.AUDITORY
        agrees = rng.random() < _PRIOR_MATCH_PROB
        prior = int(latent) if agrees else 1 - int(latent)
        for j in range(cfg.sessions_per_student):
            visual_mean = _MATCH_MEAN if latent is StyleLabel.VISUAL else _OTHER_MEAN
            auditory_mean = _OTHER_MEAN if latent is StyleLabel.VISUAL else _MATCH_MEAN
            visual = float(np.clip(visual_mean + cfg.noise_std * rng.standard_normal(), 0.0, 100.0))
            auditory = float(
                np.clip(auditory_mean + cfg.noise_std * rng.standard_normal(), 0.0, 100.0)
            )
            session = StyleSession(
                student_id=f"s{i + 1:04d}",
                instructor_id=f"t{(j % 3) + 1:02d}",
                day=j + 1,
                visual_score=visual,
                auditory_score=auditory,
                comprehension_time=float(rng.uniform(10.0, 60.0)),
                prior_preferred_style=prior,
                time_of_day=float(rng.uniform(8.0, 16.0)),
                instructor_score=float(rng.uniform(3.0, 10.0)),
                lesson_duration=float(rng.uniform(30.0, 90.0)),
            )
            out.append((session, latent))
    return out


def style_ratio_label(visual_high_tally: int, total_assessments: int) -> StyleLabel:
    """Visual iff the visual-high tally exceeds 65% of all assessments.

    The comparison is exact integer arithmetic (tally/total > 13/20), so
    65% exactly is auditory.
    """
    if total_assessments <= 0:
        raise ParameterError("total_assessments must be positive")
    if not (0 <= visual_high_tally <= total_assessments):
        raise ParameterError("tally must lie in [0, total_assessments]")
    return (
        StyleLabel.VISUAL
        if 20 * visual_high_tally > 13 * total_assessments
        else StyleLabel.AUDITORY
    )


def aggregate_sessions(sessions: list[tuple[StyleSession, StyleLabel]]) -> StyleLabel:
    """Majority vote over per-session labels; an exact tie is auditory."""
    if not sessions:
        raise ParameterError("aggregate_sessions needs at least one session")
    visual = sum(1 for _, label in sessions if label is StyleLabel.VISUAL)
    return StyleLabel.VISUAL if 2 * visual > len(sessions) else StyleLabel.AUDITORY


def route_learner_stage(
    initial_score: float,
    advanced_score: float | None,
    pass_threshold: float,
) -> StageLabel:
    """Two-gate staging: beginners fail the initial gate or the advanced probe.

    The advanced score must be present exactly when the initial score passes
    the gate.
    """
    for name, score in (("initial_score", initial_score), ("pass_threshold", pass_threshold)):
        if not (0.0 <= score <= 100.0):
            raise ParameterError(f"{name} must lie in [0, 100]")
    if initial_score < pass_threshold:
        if advanced_score is not None:
            raise ParameterError("advanced_score must be absent when the initial gate fails")
        return StageLabel.BEGINNER
    if advanced_score is None:
        raise ParameterError("advanced_score is required when the initial gate passes")
    if not (0.0 <= advanced_score <= 100.0):
        raise ParameterError("advanced_score must lie in [0, 100]")
    return StageLabel.ADVANCED if advanced_score >= pass_threshold else StageLabel.BEGINNER


def class_level_summary(stages: list[StageLabel]) -> ClassSummary:
    """Class-wide stage fractions; advanced-track only on a strict majority."""
    if not stages:
        raise ParameterError("class_level_summary needs at least one stage")
    advanced = sum(1 for s in stages if s is StageLabel.ADVANCED)
    advanced_fraction = advanced / len(stages)
    return ClassSummary(
        beginner_fraction=1.0 - advanced_fraction,
        advanced_fraction=advanced_fraction,
        recommendation="advanced-track" if advanced_fraction > 0.5 else "beginner-track",
    )


def style_schema() -> list[ColumnSchema]:
    """Schema for session CSV files produced/consumed by the style pipeline."""
    return [
        ColumnSchema("student_id", "skip"),
        ColumnSchema("instructor_id", "skip"),
        ColumnSchema("day", "skip"),
        ColumnSchema("visual_score", "numeric"),
        ColumnSchema("auditory_score", "numeric"),
        ColumnSchema("comprehension_time", "numeric"),
        ColumnSchema("prior_preferred_style", "numeric"),
        ColumnSchema("time_of_day", "numeric"),
        ColumnSchema("instructor_score", "numeric"),
        ColumnSchema("lesson_duration", "numeric"),
        ColumnSchema("style", "target", allowed_values=STYLE_CLASS_NAMES),
    ]


def build_style_dataset(pairs: list[tuple[StyleSession, StyleLabel]]) -> Dataset:
    """Six-feature design matrix: the visual/auditory scores collapse to
    their difference, keeping one coefficient slot per predictor."""
    if not pairs:
        raise ParameterError("build_style_dataset needs at least one session")
    rows = np.array(
        [
            [
                s.visual_score - s.auditory_score,
                s.comprehension_time,
                float(s.prior_preferred_style),
                s.time_of_day,
                s.instructor_score,
                s.lesson_duration,
            ]
            for s, _ in pairs
        ]
    )
    targets = np.array([int(label) for _, label in pairs], dtype=np.int64)
    return Dataset(
        features=DenseMatrix(rows),
        targets=targets,
        feature_names=STYLE_FEATURE_NAMES,
        class_names=STYLE_CLASS_NAMES,
        n_raw_columns=6,
    )


def collapse_score_columns(ds: Dataset) -> Dataset:
    """Replace visual_score/auditory_score columns with their difference."""
    names = list(ds.feature_names)
    try:
        vi = names.index("visual_score")
        ai = names.index("auditory_score")
    except ValueError:
        raise DimensionError(
            "collapse_score_columns needs visual_score and auditory_score columns"
        ) from None
    x = ds.features.values
    diff = x[:, vi] - x[:, ai]
    keep = [j for j in range(x.shape[1]) if j not in (vi, ai)]
    new_x = np.column_stack([diff, x[:, keep]]) if keep else diff[:, None]
    new_names = ["score_diff"] + [names[j] for j in keep]
    return Dataset(
        features=DenseMatrix(new_x),
        targets=ds.targets,
        feature_names=tuple(new_names),
        class_names=ds.class_names,
        n_raw_columns=len(new_names),
    )


def fit_dataset(
    ds: Dataset,
    opt: OptimizerConfig,
    split_spec: SplitSpec,
    data_source: str,
    task: str,
    schema: list[ColumnSchema] | None,
) -> tuple[CaseStudyReport, FitBundle]:
    """Shared split -> train-fit scaling -> train -> metrics path behind both
    experiments; returns the report plus everything needed to serialize."""
    train, test = data_mod.split(ds, split_spec)
    scaler = fit_scaler(train.features)
    x_train = transform(scaler, train.features)
    x_test = transform(scaler, test.features)
    model = train_logistic(x_train, train.targets, opt, class_names=ds.class_names)
    k = len(ds.class_names)
    report = CaseStudyReport(
        solver=opt.solver,
        train_metrics=compute_metrics(train.targets, predict(model, x_train), k),
        test_metrics=compute_metrics(test.targets, predict(model, x_test), k),
        class_distribution={
            name: int((train.targets == i).sum()) for i, name in enumerate(ds.class_names)
        },
        config_echo=opt,
        data_source=data_source,
    )
    bundle = FitBundle(
        model=model,
        scaler=scaler,
        feature_names=ds.feature_names,
        class_names=ds.class_names,
        task=task,
        schema=tuple(schema) if schema is not None else None,
    )
    return report, bundle


def fit_style_experiment(
    gen: StyleGenConfig, opt: OptimizerConfig, split_spec: SplitSpec
) -> tuple[CaseStudyReport, FitBundle]:
    ds = build_style_dataset(generate_style_sessions(gen))
    return fit_dataset(ds, opt, split_spec, "synthetic", "style", style_schema())


def run_style_experiment(
    gen: StyleGenConfig, opt: OptimizerConfig, split_spec: SplitSpec
) -> CaseStudyReport:
    """Generate sessions, build the 6-feature matrix, split, scale, train a
    binary logistic model, and report train/test metrics."""
    return fit_style_experiment(gen, opt, split_spec)[0]


# ---------------------------------------------------------------------------
# academic-risk case study
# ---------------------------------------------------------------------------

ACADEMIC_CLASS_NAMES = ("Graduate", "Dropout", "Enrolled")

# the generator's class prior; intercepts below are calibrated (800k-sample
# fit) so sampled proportions match it to ~1e-3
ACADEMIC_PRIOR = (0.474, 0.331, 0.195)
_ACADEMIC_INTERCEPTS = (0.0, -0.7751, 0.25)

# scale applied to every non-intercept ground-truth coefficient; tuned so the
# Bayes-optimal accuracy sits near 0.80, well above the majority-class rate
_STRENGTH = 3.5

_CATEGORIES = {
    "marital_status": ("single", "married", "divorced", "other"),
    "application_mode": ("first_phase", "second_phase", "transfer", "over_23"),
    "course": ("engineering", "business", "health", "science", "arts", "education"),
    "attendance_period": ("daytime", "evening"),
    "prev_qualification": ("secondary", "vocational", "bachelor", "master"),
    "mother_qualification": ("basic", "secondary", "higher", "unknown"),
    "father_qualification": ("basic", "secondary", "higher", "unknown"),
    "gender": ("female", "male"),
    "scholarship_holder": ("no", "yes"),
    "employment_status": ("not_employed", "part_time", "full_time"),
    "international": ("no", "yes"),
}

_CATEGORY_PROBS = {
    "marital_status": (0.72, 0.20, 0.06, 0.02),
    "application_mode": (0.45, 0.30, 0.15, 0.10),
    "course": (0.22, 0.20, 0.18, 0.15, 0.15, 0.10),
    "attendance_period": (0.85, 0.15),
    "prev_qualification": (0.75, 0.12, 0.09, 0.04),
    "mother_qualification": (0.35, 0.40, 0.20, 0.05),
    "father_qualification": (0.40, 0.38, 0.17, 0.05),
    "gender": (0.62, 0.38),
    "scholarship_holder": (0.72, 0.28),
    "employment_status": (0.68, 0.20, 0.12),
    "international": (0.95, 0.05),
}

_NUMERIC_ORDER = (
    "application_order",
    "prev_qualification_grade",
    "admission_grade",
    "age_at_enrollment",
    "credits_transferred",
    "units_1st_enrolled",
    "units_1st_evaluations",
    "units_1st_approved",
    "units_1st_grade",
    "units_2nd_enrolled",
    "units_2nd_evaluations",
    "units_2nd_approved",
    "units_2nd_grade",
    "study_hours_weekly",
    "attendance_rate",
    "assignment_submission_rate",
    "absence_days",
    "commute_minutes",
    "entrance_rank",
    "library_visits",
    "tutoring_sessions",
    "unemployment_rate",
    "inflation_rate",
    "gdp_growth",
)

_COLUMN_ORDER = (
    "marital_status",
    "application_mode",
    "application_order",
    "course",
    "attendance_period",
    "prev_qualification",
    "prev_qualification_grade",
    "admission_grade",
    "mother_qualification",
    "father_qualification",
    "gender",
    "age_at_enrollment",
    "international",
    "scholarship_holder",
    "employment_status",
    "credits_transferred",
    "units_1st_enrolled",
    "units_1st_evaluations",
    "units_1st_approved",
    "units_1st_grade",
    "units_2nd_enrolled",
    "units_2nd_evaluations",
    "units_2nd_approved",
    "units_2nd_grade",
    "study_hours_weekly",
    "attendance_rate",
    "assignment_submission_rate",
    "absence_days",
    "commute_minutes",
    "entrance_rank",
    "library_visits",
    "tutoring_sessions",
    "unemployment_rate",
    "inflation_rate",
    "gdp_growth",
)


def academic_schema() -> list[ColumnSchema]:
    """Schema of the synthetic academic CSV: 35 predictors plus Target."""
    columns = []
    for name in _COLUMN_ORDER:
        if name in _CATEGORIES:
            columns.append(ColumnSchema(name, "categorical", allowed_values=_CATEGORIES[name]))
        else:
            columns.append(ColumnSchema(name, "numeric"))
    columns.append(ColumnSchema("Target", "target", allowed_values=ACADEMIC_CLASS_NAMES))
    return columns


def _academic_sample(n_rows: int, seed: int):
    """Draw all 35 predictor columns plus the planted class logits.

    A latent per-student strength drives the achievement-flavoured columns,
    but the class logits are a fixed affine function of the *observed*
    columns only, so argmax over them is the Bayes rule given the features.
    """
    if n_rows < 10:
        raise ParameterError(f"need at least 10 rows, got {n_rows}")
    rng = np.random.default_rng(seed)
    n = n_rows
    s = rng.standard_normal(n)

    num: dict[str, np.ndarray] = {}
    num["age_at_enrollment"] = np.clip(np.round(rng.normal(21.0, 4.0, n)), 17, 55)
    num["admission_grade"] = np.clip(
        125.0 + 12.0 * (0.6 * s + 0.8 * rng.standard_normal(n)), 95.0, 190.0
    )
    num["prev_qualification_grade"] = np.clip(
        120.0 + 14.0 * (0.5 * s + 0.9 * rng.standard_normal(n)), 95.0, 190.0
    )
    num["application_order"] = rng.integers(1, 7, n).astype(float)
    p_pass = np.clip(0.55 + 0.16 * s, 0.05, 0.98)
    num["units_1st_enrolled"] = rng.integers(5, 9, n).astype(float)
    num["units_1st_approved"] = rng.binomial(num["units_1st_enrolled"].astype(int), p_pass).astype(
        float
    )
    num["units_1st_grade"] = np.clip(11.0 + 2.2 * s + rng.normal(0.0, 1.5, n), 0.0, 20.0)
    num["units_1st_evaluations"] = num["units_1st_enrolled"] + rng.poisson(2.0, n)
    num["units_2nd_enrolled"] = rng.integers(5, 9, n).astype(float)
    num["units_2nd_approved"] = rng.binomial(num["units_2nd_enrolled"].astype(int), p_pass).astype(
        float
    )
    num["units_2nd_grade"] = np.clip(11.0 + 2.2 * s + rng.normal(0.0, 1.5, n), 0.0, 20.0)
    num["units_2nd_evaluations"] = num["units_2nd_enrolled"] + rng.poisson(2.0, n)
    num["unemployment_rate"] = rng.choice([7.6, 8.9, 10.8, 12.4, 13.9, 16.2], n)
    num["inflation_rate"] = rng.choice([-0.8, 0.3, 1.4, 2.6, 3.7], n)
    num["gdp_growth"] = rng.choice([-4.06, -1.7, 0.32, 1.74, 3.51], n)
    num["study_hours_weekly"] = np.clip(rng.normal(12.0 + 3.0 * s, 4.0), 0.0, 40.0)
    num["absence_days"] = rng.poisson(np.clip(6.0 - 2.0 * s, 0.5, 15.0)).astype(float)
    num["commute_minutes"] = rng.uniform(5.0, 90.0, n)
    num["entrance_rank"] = rng.uniform(1.0, 1000.0, n)
    num["credits_transferred"] = rng.poisson(0.8, n).astype(float)
    num["library_visits"] = rng.poisson(np.clip(3.0 + s, 0.2, 10.0)).astype(float)
    num["assignment_submission_rate"] = np.clip(
        0.82 + 0.10 * s + 0.08 * rng.standard_normal(n), 0.0, 1.0
    )
    num["attendance_rate"] = np.clip(0.85 + 0.08 * s + 0.07 * rng.standard_normal(n), 0.0, 1.0)
    num["tutoring_sessions"] = rng.poisson(1.5, n).astype(float)

    cat: dict[str, np.ndarray] = {}
    for name in _CATEGORIES:
        values = np.array(_CATEGORIES[name])
        cat[name] = rng.choice(values, n, p=_CATEGORY_PROBS[name])

    # planted ground-truth logits: affine in the observed columns
    u1 = (num["units_1st_approved"] - 3.5) / 2.0
    u2 = (num["units_2nd_approved"] - 3.5) / 2.0
    att = (num["attendance_rate"] - 0.85) / 0.08
    sub = (num["assignment_submission_rate"] - 0.82) / 0.10
    adm = (num["admission_grade"] - 125.0) / 15.0
    age_c = num["age_at_enrollment"] - 21.0
    scholarship = (cat["scholarship_holder"] == "yes").astype(float)
    evening = (cat["attendance_period"] == "evening").astype(float)
    full_time = (cat["employment_status"] == "full_time").astype(float)
    part_time = (cat["employment_status"] == "part_time").astype(float)

    z_grad = _STRENGTH * (
        0.55 * u1 + 0.55 * u2 + 0.35 * att + 0.25 * sub + 0.25 * adm + 0.30 * scholarship
        - 0.10 * evening
    )
    z_drop = _STRENGTH * (
        -0.35 * u1 - 0.35 * u2 - 0.25 * att - 0.10 * sub + 0.50 * full_time + 0.20 * part_time
        + 0.035 * age_c + 0.35 * evening - 0.30 * scholarship
    )
    z_enr = _STRENGTH * (-0.10 * u1 - 0.10 * u2 + 0.15 * part_time + 0.010 * age_c)
    logits = np.column_stack([z_grad, z_drop, z_enr]) + np.array(_ACADEMIC_INTERCEPTS)

    # sample classes from the planted softmax with the same generator
    shifted = logits - logits.max(axis=1, keepdims=True)
    probs = np.exp(shifted)
    probs /= probs.sum(axis=1, keepdims=True)
    u = rng.random(n)
    targets = (u[:, None] > np.cumsum(probs, axis=1)).sum(axis=1).astype(np.int64)

    return num, cat, logits, targets


def generate_academic_synthetic(n_rows: int, seed: int) -> Dataset:
    """Desk-scale synthetic stand-in for the academic-risk dataset."""
    num, cat, _, targets = _academic_sample(n_rows, seed)
    blocks: list[np.ndarray] = []
    names: list[str] = []
    for name in _COLUMN_ORDER:
        if name in _CATEGORIES:
            values = _CATEGORIES[name]
            onehot = np.zeros((n_rows, len(values)))
            for k, v in enumerate(values):
                onehot[:, k] = cat[name] == v
            blocks.append(onehot)
            names.extend(f"{name}={v}" for v in values)
        else:
            blocks.append(num[name][:, None])
            names.append(name)
    return Dataset(
        features=DenseMatrix(np.hstack(blocks)),
        targets=targets,
        feature_names=tuple(names),
        class_names=ACADEMIC_CLASS_NAMES,
        n_raw_columns=len(_COLUMN_ORDER),
    )


def academic_bayes_predict(n_rows: int, seed: int) -> np.ndarray:
    """Bayes-optimal class indices for the exact rows generate_academic_synthetic
    produces with the same arguments (argmax of the planted logits)."""
    _, _, logits, _ = _academic_sample(n_rows, seed)
    return np.argmax(logits, axis=1).astype(np.int64)


def academic_csv_rows(n_rows: int, seed: int) -> tuple[list[str], list[list[str]]]:
    """Header and cell strings for writing the synthetic set as a CSV.

    Floats are written with repr so a load round-trips bit-exactly.
    """
    num, cat, _, targets = _academic_sample(n_rows, seed)
    header = list(_COLUMN_ORDER) + ["Target"]
    rows = []
    for i in range(n_rows):
        row = []
        for name in _COLUMN_ORDER:
            if name in _CATEGORIES:
                row.append(str(cat[name][i]))
            else:
                row.append(repr(float(num[name][i])))
        row.append(ACADEMIC_CLASS_NAMES[targets[i]])
        rows.append(row)
    return header, rows


@dataclass(frozen=True)
class SyntheticSource:
    """Use the planted synthetic generator as the case-study data source."""

    n_rows: int = 5000
    seed: int = 0


@dataclass(frozen=True)
class CsvSource:
    """Use a local CSV (plus schema document) as the case-study data source.

    With ``schema_path=None`` the packaged schema for the public academic
    success dataset is used.
    """

    csv_path: str
    schema_path: str | None = None


def packaged_academic_schema() -> list[ColumnSchema]:
    """Schema shipped for the public academic-success CSV (Target column,
    class order Graduate/Dropout/Enrolled)."""
    ref = resources.files("edulearn").joinpath("schemas/academic_kaggle.json")
    with resources.as_file(ref) as path:
        return data_mod.read_schema(path)


def academic_defaults(solver: str) -> OptimizerConfig:
    """Case-study defaults: L-BFGS capped at 1000 iterations, or SGD with
    log loss at a constant 0.01 rate for 100 epochs."""
    if solver == "sgd":
        return OptimizerConfig(solver="sgd", learning_rate=0.01, epochs=100)
    if solver == "lbfgs":
        return OptimizerConfig(solver="lbfgs", max_iter=1000)
    if solver == "gd":
        return OptimizerConfig(solver="gd", max_iter=1000)
    raise ParameterError(f"unknown solver '{solver}'")


def fit_academic_case_study(
    source,
    solver: str,
    split_spec: SplitSpec,
    opt: OptimizerConfig | None = None,
) -> tuple[CaseStudyReport, FitBundle]:
    if opt is None:
        opt = academic_defaults(solver)
    if opt.solver != solver:
        raise ParameterError(f"solver argument '{solver}' does not match config '{opt.solver}'")
    if isinstance(source, CsvSource):
        schema = (
            data_mod.read_schema(source.schema_path)
            if source.schema_path is not None
            else packaged_academic_schema()
        )
        ds = data_mod.load_csv(source.csv_path, schema)
        # pin observed categorical/class orders so the saved model can encode
        # future prediction inputs identically
        schema = data_mod.resolved_schema(schema, ds)
        data_source = "external"
    elif isinstance(source, SyntheticSource):
        schema = academic_schema()
        ds = generate_academic_synthetic(source.n_rows, source.seed)
        data_source = "synthetic"
    else:
        raise ParameterError(f"unsupported source type {type(source).__name__}")
    return fit_dataset(ds, opt, split_spec, data_source, "academic", schema)


def run_academic_case_study(
    source,
    solver: str,
    split_spec: SplitSpec,
    opt: OptimizerConfig | None = None,
) -> CaseStudyReport:
    """Ingest, 70:30 split (per split_spec), train-fit scaling, train with the
    named solver, and report metrics plus the training class distribution."""
    return fit_academic_case_study(source, solver, split_spec, opt)[0]
