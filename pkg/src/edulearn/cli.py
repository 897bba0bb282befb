"""Command-line interface: synthetic data generation, training, and
prediction with deterministic, machine-readable outputs.

Output files are written atomically (temp file + rename) and floats are
serialized with 17 significant digits, so a rerun with the same flags and
seed is byte-identical. Exit codes: 0 success, 1 runtime/data error,
2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from importlib import resources

import jsonschema

from . import data as data_mod
from . import pipelines
from .classify import LogisticModel, OptimizerConfig, predict, proba_full
from .data import ColumnSchema, ScalerParams, transform
from .errors import EdulearnError, ParameterError, SchemaError
from .numcore import DenseMatrix, DenseVector

REPORT_VERSION = 1
MODEL_VERSION = 1

OUTPUT_REPORT = "report.json"
OUTPUT_MODEL = "model.json"
OUTPUT_PREDICTIONS = "predictions.csv"
OUTPUT_DATA = "data.csv"
OUTPUT_SCHEMA = "schema.json"


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------


def format_float(value: float) -> str:
    """17 significant digits: enough to round-trip any double exactly."""
    return format(float(value), ".17g")


def dumps_canonical(value, indent: int = 0) -> str:
    """JSON with deterministic float formatting and 2-space indentation."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps_canonical(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{inner}{dumps_canonical(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the target directory plus rename, so a failed
    write never leaves a partial file behind."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory or ".", prefix=".edulearn-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def _report_schema() -> dict:
    ref = resources.files("edulearn").joinpath("report_schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# JSON document builders
# ---------------------------------------------------------------------------


def metrics_to_doc(metrics, class_names) -> dict:
    return {
        "accuracy": float(metrics.accuracy),
        "per_class": [
            {
                "class": name,
                "precision": float(m.precision),
                "recall": float(m.recall),
                "f1": float(m.f1),
            }
            for name, m in zip(class_names, metrics.per_class)
        ],
        "macro": {
            "precision": float(metrics.macro.precision),
            "recall": float(metrics.macro.recall),
            "f1": float(metrics.macro.f1),
        },
        "confusion": [[int(v) for v in row] for row in metrics.confusion],
    }


def config_to_doc(opt: OptimizerConfig, train_fraction: float, pass_threshold: float) -> dict:
    return {
        "solver": opt.solver,
        "max_iter": int(opt.max_iter),
        "epochs": int(opt.epochs),
        "learning_rate": float(opt.learning_rate),
        "tol": float(opt.tol),
        "l2": float(opt.l2),
        "l1": float(opt.l1),
        "lbfgs_memory": int(opt.lbfgs_memory),
        "seed": int(opt.seed),
        "train_fraction": float(train_fraction),
        "pass_threshold": float(pass_threshold),
    }


def text_block(report: pipelines.CaseStudyReport, class_names) -> str:
    """Human-readable metrics block (class counts, then percentage lines)."""
    width = max(len(name) for name in class_names) + 4
    lines = ["Class distribution in the training data:", "", "Target"]
    for name in class_names:
        lines.append(f"{name:<{width}}{report.class_distribution[name]}")
    lines.append("")
    for split_name, metrics in (("Training", report.train_metrics), ("Test", report.test_metrics)):
        lines.append(f"{split_name} Accuracy: {metrics.accuracy * 100:.2f}%")
        lines.append(f"{split_name} Precision: {metrics.macro.precision * 100:.2f}%")
        lines.append(f"{split_name} Recall: {metrics.macro.recall * 100:.2f}%")
        lines.append(f"{split_name} F1 Score: {metrics.macro.f1 * 100:.2f}%")
    return "\n".join(lines)


def report_to_doc(
    report: pipelines.CaseStudyReport,
    task: str,
    class_names,
    train_fraction: float,
    pass_threshold: float,
) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "task": task,
        "solver": report.solver,
        "data_source": report.data_source,
        "config_echo": config_to_doc(report.config_echo, train_fraction, pass_threshold),
        "class_distribution": {k: int(v) for k, v in report.class_distribution.items()},
        "train_metrics": metrics_to_doc(report.train_metrics, class_names),
        "test_metrics": metrics_to_doc(report.test_metrics, class_names),
        "text_block": text_block(report, class_names),
    }


def schema_to_doc(columns) -> dict:
    doc = {"schema_version": data_mod.SCHEMA_VERSION, "columns": []}
    for c in columns:
        entry: dict = {"name": c.name, "kind": c.kind}
        if c.allowed_values is not None:
            entry["allowed_values"] = list(c.allowed_values)
        doc["columns"].append(entry)
    return doc


def linear_model_to_doc(model, feature_names, fit: "object | None" = None) -> dict:
    """Serialize a regress.LinearModel to the shared report schema."""
    doc = {
        "intercept": float(model.intercept),
        "coefficients": [float(v) for v in model.coefficients.values],
        "feature_names": list(feature_names),
    }
    if fit is not None:
        doc["fit"] = {"lsr": float(fit.lsr), "r_squared": float(fit.r_squared)}
    return doc


def model_to_doc(bundle: pipelines.FitBundle, opt: OptimizerConfig) -> dict:
    model: LogisticModel = bundle.model
    return {
        "model_version": MODEL_VERSION,
        "task": bundle.task,
        "model_type": "binary" if model.is_binary else "multinomial",
        "class_names": list(model.class_names),
        "feature_names": list(bundle.feature_names),
        "weights": [[float(v) for v in row] for row in model.weights.values],
        "intercepts": [float(v) for v in model.intercepts.values],
        "converged": bool(model.converged),
        "iterations_used": int(model.iterations_used),
        "config": {
            "solver": opt.solver,
            "max_iter": int(opt.max_iter),
            "epochs": int(opt.epochs),
            "learning_rate": float(opt.learning_rate),
            "tol": float(opt.tol),
            "l2": float(opt.l2),
            "l1": float(opt.l1),
            "lbfgs_memory": int(opt.lbfgs_memory),
            "seed": int(opt.seed),
        },
        "scaler": {
            "means": [float(v) for v in bundle.scaler.means.values],
            "stds": [float(v) for v in bundle.scaler.stds.values],
        },
        "schema": schema_to_doc(bundle.schema) if bundle.schema is not None else None,
    }


def model_from_doc(doc: dict):
    """Rebuild (model, scaler, schema columns, task, feature_names) from model.json."""
    if doc.get("model_version") != MODEL_VERSION:
        raise SchemaError(f"unsupported model document (want model_version {MODEL_VERSION})")
    model = LogisticModel(
        weights=DenseMatrix(doc["weights"]),
        intercepts=DenseVector(doc["intercepts"]),
        class_names=tuple(doc["class_names"]),
        converged=bool(doc["converged"]),
        iterations_used=int(doc["iterations_used"]),
    )
    scaler = ScalerParams(
        means=DenseVector(doc["scaler"]["means"]),
        stds=DenseVector(doc["scaler"]["stds"]),
    )
    columns = None
    if doc.get("schema") is not None:
        columns = [
            ColumnSchema(
                name=entry["name"],
                kind=entry["kind"],
                allowed_values=tuple(entry["allowed_values"])
                if entry.get("allowed_values") is not None
                else None,
            )
            for entry in doc["schema"]["columns"]
        ]
    return model, scaler, columns, doc["task"], tuple(doc["feature_names"])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _style_csv(pairs) -> tuple[list[str], list[list[str]]]:
    header = [c.name for c in pipelines.style_schema()]
    rows = []
    for session, label in pairs:
        rows.append(
            [
                session.student_id,
                session.instructor_id,
                str(session.day),
                repr(session.visual_score),
                repr(session.auditory_score),
                repr(session.comprehension_time),
                str(session.prior_preferred_style),
                repr(session.time_of_day),
                repr(session.instructor_score),
                repr(session.lesson_duration),
                pipelines.STYLE_CLASS_NAMES[int(label)],
            ]
        )
    return header, rows


def cmd_generate(args, seed: int) -> int:
    if args.kind == "style":
        cfg = pipelines.StyleGenConfig(
            n_students=args.n if args.n is not None else 200,
            sessions_per_student=args.sessions_per_student,
            visual_fraction=args.visual_fraction,
            noise_std=args.noise_std,
            seed=seed,
        )
        header, rows = _style_csv(pipelines.generate_style_sessions(cfg))
        columns = pipelines.style_schema()
    else:
        n = args.n if args.n is not None else 5000
        header, rows = pipelines.academic_csv_rows(n, seed)
        columns = pipelines.academic_schema()

    csv_path = args.out + OUTPUT_DATA
    schema_path = args.out + OUTPUT_SCHEMA
    atomic_write_text(csv_path, _csv_text(header, rows))
    schema_text = dumps_canonical(schema_to_doc(columns)) + "\n"
    atomic_write_text(schema_path, schema_text)
    print(f"wrote {len(rows)} rows to {csv_path} (schema: {schema_path})")
    return 0


OVERRIDE_KEYS = (
    "max_iter",
    "epochs",
    "learning_rate",
    "l2",
    "l1",
    "tol",
    "train_fraction",
    "pass_threshold",
)


@dataclass(frozen=True)
class RunConfig:
    """Validated view of a train invocation.

    ``overrides`` holds only the settings the caller actually supplied,
    restricted to the recognized keys; anything else is a startup error
    (unknown flags never get this far thanks to argparse).
    """

    command: str
    input_path: str | None
    schema_path: str | None
    output_path: str
    solver: str
    seed: int
    overrides: dict[str, float]

    def __post_init__(self):
        unknown = set(self.overrides) - set(OVERRIDE_KEYS)
        if unknown:
            raise ParameterError(f"unrecognized override keys: {sorted(unknown)}")


def _train_run_config(args, seed: int) -> RunConfig:
    overrides = {
        key: getattr(args, key) for key in OVERRIDE_KEYS if getattr(args, key) is not None
    }
    return RunConfig(
        command="train",
        input_path=args.input,
        schema_path=args.schema,
        output_path=args.out,
        solver=args.solver,
        seed=seed,
        overrides=overrides,
    )


def _build_optimizer(cfg: RunConfig, task: str) -> OptimizerConfig:
    kwargs: dict = {"solver": cfg.solver, "seed": cfg.seed}
    for key in ("max_iter", "epochs", "learning_rate", "tol", "l1", "l2"):
        if key in cfg.overrides:
            kwargs[key] = cfg.overrides[key]
    if task == "style" and "l2" not in kwargs:
        kwargs["l2"] = 0.1  # separable planted data: keep weights finite
    return OptimizerConfig(**kwargs)


def cmd_train(args, seed: int) -> int:
    cfg = _train_run_config(args, seed)
    opt = _build_optimizer(cfg, args.task)
    train_fraction = cfg.overrides.get("train_fraction", 0.7)
    pass_threshold = cfg.overrides.get("pass_threshold", 70.0)
    split_spec = data_mod.SplitSpec(train_fraction=train_fraction, seed=seed)

    if args.task == "style":
        if cfg.input_path is not None:
            columns = (
                data_mod.read_schema(cfg.schema_path)
                if cfg.schema_path is not None
                else pipelines.style_schema()
            )
            raw = data_mod.load_csv(cfg.input_path, columns)
            ds = pipelines.collapse_score_columns(raw)
            resolved = data_mod.resolved_schema(columns, raw)
            report, bundle = pipelines.fit_dataset(
                ds, opt, split_spec, "external", "style", resolved
            )
        else:
            gen = pipelines.StyleGenConfig(
                n_students=args.n if args.n is not None else 200, seed=seed
            )
            report, bundle = pipelines.fit_style_experiment(gen, opt, split_spec)
    else:
        if cfg.input_path is not None:
            source = pipelines.CsvSource(cfg.input_path, cfg.schema_path)
        else:
            source = pipelines.SyntheticSource(
                n_rows=args.n if args.n is not None else 5000, seed=seed
            )
        report, bundle = pipelines.fit_academic_case_study(source, args.solver, split_spec, opt)

    doc = report_to_doc(report, args.task, bundle.class_names, train_fraction, pass_threshold)
    report_text = dumps_canonical(doc) + "\n"
    jsonschema.validate(json.loads(report_text), _report_schema())
    atomic_write_text(cfg.output_path + OUTPUT_REPORT, report_text)
    atomic_write_text(
        cfg.output_path + OUTPUT_MODEL, dumps_canonical(model_to_doc(bundle, opt)) + "\n"
    )
    if not args.json:
        print(doc["text_block"])
    return 0


def cmd_predict(args) -> int:
    with open(args.model, encoding="utf-8") as fh:
        doc = json.load(fh)
    model, scaler, columns, task, feature_names = model_from_doc(doc)
    if columns is None:
        raise SchemaError("model document carries no schema; cannot ingest raw CSV input")
    ds = data_mod.load_csv(args.input, columns, require_target=False)
    if task == "style":
        ds = pipelines.collapse_score_columns(ds)
    if ds.feature_names != feature_names:
        missing = [n for n in feature_names if n not in ds.feature_names]
        extra = [n for n in ds.feature_names if n not in feature_names]
        raise SchemaError(
            f"input features do not match the model (missing {missing}, unexpected {extra})"
        )
    x = transform(scaler, ds.features)
    proba = proba_full(model, x)
    labels = predict(model, x)

    header = ["row", "predicted_class"] + [f"p_{name}" for name in model.class_names]
    rows = []
    for i in range(x.rows):
        rows.append(
            [str(i), model.class_names[labels[i]]] + [format_float(p) for p in proba[i]]
        )
    atomic_write_text(args.out + OUTPUT_PREDICTIONS, _csv_text(header, rows))
    print(f"wrote {len(rows)} predictions to {args.out + OUTPUT_PREDICTIONS}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edulearn",
        description="Learning-style and academic-risk classification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic CSV plus matching schema")
    gen.add_argument("--kind", choices=["style", "academic"], required=True)
    gen.add_argument("--n", type=int, help="students (style) or rows (academic)")
    gen.add_argument("--sessions-per-student", type=int, default=3)
    gen.add_argument("--visual-fraction", type=float, default=0.5)
    gen.add_argument("--noise-std", type=float, default=8.0)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", default="", help="output path prefix")

    train = sub.add_parser("train", help="train a pipeline and write report + model")
    train.add_argument("--task", choices=["style", "academic"], required=True)
    train.add_argument("--input", help="CSV path; omitted = synthetic source")
    train.add_argument("--schema", help="schema JSON path (default: packaged/task schema)")
    train.add_argument("--solver", choices=["lbfgs", "sgd", "gd"], default="lbfgs")
    train.add_argument("--seed", type=int)
    train.add_argument("--n", type=int, help="synthetic size when --input is omitted")
    train.add_argument("--max-iter", type=int, dest="max_iter")
    train.add_argument("--epochs", type=int)
    train.add_argument("--learning-rate", type=float, dest="learning_rate")
    train.add_argument("--l1", type=float)
    train.add_argument("--l2", type=float)
    train.add_argument("--tol", type=float)
    train.add_argument("--train-fraction", type=float, dest="train_fraction")
    train.add_argument("--pass-threshold", type=float, dest="pass_threshold")
    train.add_argument("--json", action="store_true", help="suppress the text metrics block")
    train.add_argument("--out", default="", help="output path prefix")

    pred = sub.add_parser("predict", help="apply a saved model to a feature CSV")
    pred.add_argument("--model", required=True)
    pred.add_argument("--input", required=True)
    pred.add_argument("--out", default="", help="output path prefix")
    return parser


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("EDULEARN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParameterError(f"EDULEARN_SEED must be an integer, got '{env}'") from None
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args, _resolve_seed(args))
        if args.command == "train":
            return cmd_train(args, _resolve_seed(args))
        return cmd_predict(args)
    except ParameterError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    except EdulearnError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
