#!/usr/bin/env python3
"""Join KuaiRec big_matrix.csv with user_features.csv and sample rows.

Writes user_id, video_id, watch_ratio, video_duration and the user
attribute columns named in configs/kuairec.schema.
"""
import argparse
from pathlib import Path

import pandas as pd

USER_COLUMNS = ["user_active_degree", "follow_user_num_range", "fans_user_num_range", "register_days_range"]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--raw", type=Path, required=True, help="KuaiRec data directory")
    ap.add_argument("--out", type=Path, default=Path("data/kuairec/kuairec_joined.tsv"))
    ap.add_argument("--rows", type=int, default=50000)
    ap.add_argument("--seed", type=int, default=2023)
    args = ap.parse_args()

    inter = pd.read_csv(args.raw / "big_matrix.csv", usecols=["user_id", "video_id", "video_duration", "watch_ratio"])
    if args.rows and len(inter) > args.rows:
        inter = inter.sample(n=args.rows, random_state=args.seed)
    users = pd.read_csv(args.raw / "user_features.csv", usecols=["user_id"] + USER_COLUMNS)
    df = inter.merge(users, on="user_id", how="left")
    for c in USER_COLUMNS:
        df[c] = df[c].fillna("NA").astype(str).str.replace(r"\s+", "_", regex=True)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    df[["user_id", "video_id", "watch_ratio", "video_duration"] + USER_COLUMNS].to_csv(args.out, sep="\t", index=False)
    print(f"wrote {len(df)} rows to {args.out}")


if __name__ == "__main__":
    main()
