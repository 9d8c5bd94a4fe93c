"""Single command-line entry point: train, diagnose, evaluate, serve, inspect.

Exit codes: 0 success, 1 usage, 2 data error, 3 runtime error. Machine
output (JSON) goes to stdout, human-readable summaries to stderr. Every
flag default can be overridden by a ROENTGEN_-prefixed environment
variable (explicit flags still win).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .diagnosis import Diagnosis, PNEUMONIC, decide_label
from .errors import RoentgenError, TrainingError, TrialError
from .evaluation import build_trials, render_table, run_trial, summarize
from .imaging import load_manifest, decode_pgm, to_input_tensor
from .kb import load_kb, save_kb
from .network import architecture_fingerprint, build_vgg16, forward, init_weights
from .service import ServiceConfig, create_app, load_model
from .training import TrainConfig, train_head

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env(name: str, fallback, cast=str):
    raw = os.environ.get(f"ROENTGEN_{name}")
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        print(f"roentgen: invalid ROENTGEN_{name}={raw!r}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> _Parser:
    parser = _Parser(prog="roentgen", description=__doc__)
    parser.add_argument("--json", action="store_true", help="machine-readable errors on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", parents=[], help="train the classifier head on a dataset")
    train.add_argument("--data", required=True, help="dataset dir with pneumonic/ and not_pneumonic/")
    train.add_argument("--out", required=True, help="output model file (.rkb)")
    train.add_argument("--input-size", type=int, default=_env("INPUT_SIZE", 32, int))
    train.add_argument("--channels", type=int, default=_env("CHANNELS", 1, int), choices=(1, 3))
    train.add_argument("--head-units", type=int, default=_env("HEAD_UNITS", 256, int))
    train.add_argument("--epochs", type=int, default=_env("EPOCHS", 20, int))
    train.add_argument("--lr", type=float, default=_env("LR", 0.01, float))
    train.add_argument("--batch-size", type=int, default=_env("BATCH_SIZE", 10, int))
    train.add_argument("--seed", type=int, default=_env("SEED", 7, int))
    train.add_argument("--threshold", type=float, default=_env("THRESHOLD", 0.5, float))
    train.add_argument("--augment-hflip", action="store_true")
    train.add_argument("--metrics", help="write per-epoch metrics as JSON lines")

    diag = sub.add_parser("diagnose", help="diagnose one PGM image")
    diag.add_argument("image", help="path to a binary PGM file")
    diag.add_argument("--model", required=True, help="model file (.rkb)")
    diag.add_argument("--threshold", type=float, default=None)

    ev = sub.add_parser("evaluate", help="run the confirmatory-test harness")
    ev.add_argument("--data", required=True)
    ev.add_argument("--model", help="model file (.rkb); omit with --predictions")
    ev.add_argument("--trials", type=int, default=_env("TRIALS", 5, int))
    ev.add_argument("--per-class", type=int, default=_env("PER_CLASS", 50, int))
    ev.add_argument("--seed", type=int, default=_env("SEED", 7, int))
    ev.add_argument(
        "--predictions",
        help="JSON file of {image_id: label} replacing model inference (verification mode)",
    )

    serve = sub.add_parser("serve", help="start the diagnosis HTTP service")
    serve.add_argument("--model", default=_env("MODEL", None), required="ROENTGEN_MODEL" not in os.environ)
    serve.add_argument("--host", default=_env("HOST", "127.0.0.1"))
    serve.add_argument("--port", type=int, default=_env("PORT", 8000, int))
    serve.add_argument("--upload-limit", type=int, default=_env("UPLOAD_LIMIT", 8 * 1024 * 1024, int))
    serve.add_argument("--storage", default=_env("STORAGE", "storage"))
    serve.add_argument("--metrics", default=_env("METRICS", None))

    ins = sub.add_parser("inspect", help="print model tensors, fingerprint, metadata")
    ins.add_argument("--model", required=True)
    return parser


def _created_stamp() -> str:
    # honor SOURCE_DATE_EPOCH so builds can be byte-reproducible
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()
    return datetime.now(timezone.utc).isoformat()


def cmd_train(args) -> int:
    manifest = load_manifest(args.data)
    size = args.input_size
    per_label = {PNEUMONIC: 0}
    dataset = []
    for item in manifest:
        label = 1 if item.label == PNEUMONIC else 0
        per_label[item.label] = per_label.get(item.label, 0) + 1
        dataset.append((to_input_tensor(item.image, (size, size), args.channels), label))
    counts = [sum(1 for _, y in dataset if y == v) for v in (0, 1)]
    if min(counts, default=0) < 1:
        raise ValueError(f"need at least one image per class, got {counts} (not/pneumonic)")

    net = build_vgg16((size, size, args.channels), args.head_units)
    kb = init_weights(net, args.seed)
    cfg = TrainConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        augment_hflip=args.augment_hflip,
        threshold=args.threshold,
    )
    trained, metrics = train_head(net, kb, dataset, cfg)
    trained.metadata.update(
        {
            "input_shape": [size, size, args.channels],
            "head_units": args.head_units,
            "threshold": args.threshold,
            "created": _created_stamp(),
            "fingerprint": architecture_fingerprint(net),
        }
    )
    if args.metrics:
        lines = "".join(json.dumps(m.to_dict()) + "\n" for m in metrics)
        Path(args.metrics).write_text(lines)
    with open(args.out, "wb") as fh:
        save_kb(trained, fh)
    final = metrics[-1]
    print(json.dumps(final.to_dict()))
    print(
        f"trained {len(dataset)} images for {len(metrics)} epochs: "
        f"loss {final.loss:.4f}, accuracy {final.accuracy:.3f} -> {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_diagnose(args) -> int:
    net, kb = load_model(args.model)
    threshold = args.threshold if args.threshold is not None else float(kb.metadata.get("threshold", 0.5))
    image = decode_pgm(Path(args.image).read_bytes())
    h, w, c = net.input_shape
    score = forward(net, kb, to_input_tensor(image, (h, w), c))
    result = Diagnosis(
        label=decide_label(score, threshold),
        score=score,
        threshold=threshold,
        model_fingerprint=kb.fingerprint(),
        image_id=Path(args.image).stem,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )
    print(json.dumps(result.to_dict(), indent=2))
    print(f"{args.image}: {result.label} (score {score:.4f})", file=sys.stderr)
    return EXIT_OK


def _model_classifier(model_path):
    net, kb = load_model(model_path)
    threshold = float(kb.metadata.get("threshold", 0.5))
    fingerprint = kb.fingerprint()
    h, w, c = net.input_shape

    def classify(item):
        score = forward(net, kb, to_input_tensor(item.image, (h, w), c))
        return Diagnosis(decide_label(score, threshold), score, threshold, fingerprint, item.id)

    return classify


def _canned_classifier(predictions_path):
    table = json.loads(Path(predictions_path).read_text())

    def classify(item):
        label = table[item.id]
        score = 1.0 if label == PNEUMONIC else 0.0
        return Diagnosis(label, score, 0.5, "canned", item.id)

    return classify


def cmd_evaluate(args) -> int:
    manifest = load_manifest(args.data)
    if args.predictions:
        classify = _canned_classifier(args.predictions)
    elif args.model:
        classify = _model_classifier(args.model)
    else:
        raise ValueError("evaluate needs --model or --predictions")
    rng = np.random.default_rng(args.seed)
    sets = build_trials(manifest, args.trials, args.per_class, rng)
    trials = [run_trial(classify, test_set, i) for i, test_set in enumerate(sets, start=1)]
    report = summarize(trials)
    print(report.to_json())
    print(render_table(report), file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    config = ServiceConfig(
        model_path=args.model,
        host=args.host,
        port=args.port,
        upload_limit=args.upload_limit,
        storage_dir=args.storage,
        metrics_path=args.metrics,
    )
    app = create_app(config)
    print(f"serving {args.model} on http://{args.host}:{args.port}", file=sys.stderr)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_inspect(args) -> int:
    with open(args.model, "rb") as fh:
        kb = load_kb(fh)
    tensors = [
        {"name": name, "shape": list(kb.entries[name].shape)} for name in sorted(kb.entries)
    ]
    pairs = sum(1 for name in kb.entries if name.endswith(".w"))
    out = {
        "fingerprint": kb.fingerprint(),
        "metadata": kb.metadata,
        "tensor_count": len(tensors),
        "weight_pairs": pairs,
        "tensors": tensors,
    }
    print(json.dumps(out, indent=2))
    print(f"{args.model}: {len(tensors)} tensors, {pairs} weight/bias pairs", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "diagnose": cmd_diagnose,
    "evaluate": cmd_evaluate,
    "serve": cmd_serve,
    "inspect": cmd_inspect,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (TrainingError, TrialError) as exc:
        return _fail(args, EXIT_RUNTIME, str(exc))
    except (RoentgenError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        return _fail(args, EXIT_DATA, str(exc))


def _fail(args, code: int, message: str) -> int:
    if getattr(args, "json", False):
        print(json.dumps({"error": message, "exit_code": code}))
    print(f"error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
