#!/usr/bin/env python3
"""Join the Book-Crossing CSV dump into one TSV and sample interactions.

Expects BX-Book-Ratings.csv, BX-Users.csv and BX-Books.csv (semicolon
separated, latin-1) in --raw. Writes user_id, isbn, rating, age, country,
author, year, publisher.
"""
import argparse
from pathlib import Path

import pandas as pd


def read_bx(path):
    return pd.read_csv(path, sep=";", encoding="latin-1", dtype=str, on_bad_lines="skip")


def clean(col):
    return col.fillna("NA").str.replace(r"[\t\r\n]+", " ", regex=True).str.strip().replace("", "NA")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--raw", type=Path, required=True)
    ap.add_argument("--out", type=Path, default=Path("data/book_crossing/bx_joined.tsv"))
    ap.add_argument("--rows", type=int, default=50000)
    ap.add_argument("--seed", type=int, default=2023)
    args = ap.parse_args()

    ratings = read_bx(args.raw / "BX-Book-Ratings.csv")
    users = read_bx(args.raw / "BX-Users.csv")
    books = read_bx(args.raw / "BX-Books.csv")

    df = ratings.merge(users, on="User-ID", how="left").merge(books, on="ISBN", how="left")
    if args.rows and len(df) > args.rows:
        df = df.sample(n=args.rows, random_state=args.seed)

    out = pd.DataFrame({
        "user_id": clean(df["User-ID"]),
        "isbn": clean(df["ISBN"]),
        "rating": clean(df["Book-Rating"]),
        "age": clean(df["Age"]),
        "country": clean(df["Location"].str.split(",").str[-1]),
        "author": clean(df["Book-Author"]),
        "year": clean(df["Year-Of-Publication"]),
        "publisher": clean(df["Publisher"]),
    })
    args.out.parent.mkdir(parents=True, exist_ok=True)
    out.to_csv(args.out, sep="\t", index=False)
    print(f"wrote {len(out)} rows to {args.out}")


if __name__ == "__main__":
    main()
