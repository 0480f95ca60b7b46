#!/usr/bin/env python3
"""Convert a dense ARFF dataset into the CSV pair + manifest this project loads.

Multilabel (label attributes last, 0/1 nominal):
    python3 scripts/arff_to_csv.py --arff emotions.arff --task multilabel \
        --labels 6 --out-dir data/emotions --name emotions

Multiclass (single nominal class attribute last; tokens become 0-based ids
in declaration order):
    python3 scripts/arff_to_csv.py --arff ecoli.arff --task multiclass \
        --out-dir data/ecoli --name ecoli
"""

import argparse
import os
import re


def parse_arff(path):
    attributes = []  # (name, spec)
    rows = []
    in_data = False
    with open(path, encoding="utf-8", errors="replace") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            low = line.lower()
            if low.startswith("@attribute"):
                m = re.match(r"@attribute\s+('[^']*'|\"[^\"]*\"|\S+)\s+(.*)", line,
                             re.IGNORECASE)
                name = m.group(1).strip("'\"")
                attributes.append((name, m.group(2).strip()))
            elif low.startswith("@data"):
                in_data = True
            elif in_data:
                if line.startswith("{"):
                    raise SystemExit("sparse ARFF rows are not supported")
                rows.append([c.strip().strip("'\"") for c in line.split(",")])
    return attributes, rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--arff", required=True)
    ap.add_argument("--task", choices=["multilabel", "multiclass"], required=True)
    ap.add_argument("--labels", type=int, default=1,
                    help="number of trailing label attributes (multilabel)")
    ap.add_argument("--out-dir", required=True)
    ap.add_argument("--name", required=True)
    args = ap.parse_args()

    attributes, rows = parse_arff(args.arff)
    n_labels = args.labels if args.task == "multilabel" else 1
    n_features = len(attributes) - n_labels
    if n_features < 1:
        raise SystemExit("label count leaves no feature columns")

    os.makedirs(args.out_dir, exist_ok=True)
    features_name = f"{args.name}_features.csv"
    labels_name = f"{args.name}_labels.csv"

    class_ids = None
    if args.task == "multiclass":
        spec = attributes[-1][1]
        m = re.match(r"\{(.*)\}", spec)
        if not m:
            raise SystemExit(f"class attribute is not nominal: {spec}")
        tokens = [t.strip().strip("'\"") for t in m.group(1).split(",")]
        class_ids = {tok: i for i, tok in enumerate(tokens)}
        print(f"classes ({len(tokens)}): {tokens}")

    with open(os.path.join(args.out_dir, features_name), "w") as fx, \
         open(os.path.join(args.out_dir, labels_name), "w") as fy:
        for row in rows:
            if len(row) != len(attributes):
                raise SystemExit(f"row has {len(row)} cells, expected {len(attributes)}")
            feats = [str(float(v)) for v in row[:n_features]]
            fx.write(",".join(feats) + "\n")
            if args.task == "multilabel":
                labels = row[n_features:]
                for v in labels:
                    if v not in ("0", "1"):
                        raise SystemExit(f"unexpected label token {v!r}")
                fy.write(",".join(labels) + "\n")
            else:
                fy.write(f"{class_ids[row[-1]]}\n")

    manifest = os.path.join(args.out_dir, f"{args.name}.manifest")
    with open(manifest, "w") as fm:
        fm.write(f"name={args.name}\n")
        fm.write(f"task={args.task}\n")
        fm.write(f"features_path={features_name}\n")
        fm.write(f"labels_path={labels_name}\n")
        fm.write("has_header=false\n")
        if args.task == "multilabel":
            fm.write("positive_token=1\n")
            fm.write("negative_token=0\n")

    print(f"{args.name}: {len(rows)} rows, {n_features} features, "
          f"{n_labels if args.task == 'multilabel' else len(class_ids)} "
          f"{'labels' if args.task == 'multilabel' else 'classes'} -> {args.out_dir}")


if __name__ == "__main__":
    main()
