#!/usr/bin/env python3
"""Writes the synthetic disease-name corpus used by the acceptance suite.

The vocabulary is built from body-system groups x disease centers: every
group/center combination is a 4-digit parent ("腹部囊肿") and each organ in
the group that carries the center is a 6-digit child ("肝囊肿"). Seed pairs
and held-out queries are clinician-style surface variants of vocabulary
names. Most held-out queries target names that never appear in the seed
pairs.

Usage: make_synthetic_corpus.py OUT_DIR
"""

import os
import random
import sys

SEED = 20230601

GROUPS = [
    ("J", "胸部", ["肺", "支气管", "胸膜", "纵隔", "食管", "肺上叶", "肺下叶"]),
    ("K", "腹部", ["肝", "胃", "胆囊", "胰腺", "脾", "肾", "结肠", "直肠", "升结肠"]),
    ("G", "头颈部", ["脑", "甲状腺", "喉", "鼻咽", "腮腺"]),
    ("M", "下肢", ["股骨", "胫骨", "膝关节", "踝关节"]),
]
# Finer regions nest under an organ instead of directly under the group.
SUBREGIONS = {"肺上叶": "肺", "肺下叶": "肺", "升结肠": "结肠"}

CENTERS = ["恶性肿瘤", "良性肿瘤", "囊肿", "结石", "出血", "损伤", "感染",
           "结核", "息肉", "钙化"]
CHARACTERISTICS = ["急性", "慢性", "继发性", "原发性"]

# Colloquial replacements for a center; these make low-similarity pairs.
CENTER_SYNONYMS = {"恶性肿瘤": "癌", "良性肿瘤": "良性瘤", "损伤": "伤"}


def build_vocab(rng):
    entries = []  # (code, name, region, center)
    for ci, center in enumerate(CENTERS):
        for letter, group, organs in GROUPS:
            code4 = f"{letter}{10 + ci}.{GROUPS.index((letter, group, organs))}"
            entries.append((code4, group + center, group, center))
            n = 0
            for organ in organs:
                if rng.random() < 0.7:
                    n += 1
                    entries.append((f"{code4}{n:02d}", organ + center, organ, center))
                    if rng.random() < 0.12:
                        ch = rng.choice(CHARACTERISTICS)
                        n += 1
                        entries.append(
                            (f"{code4}{n:02d}", ch + organ + center, organ, center))
    return entries


def variants(name, center):
    out = ["左" + name, "右" + name, "双侧" + name, name + "待查",
           name + "术后", "疑似" + name]
    if center in CENTER_SYNONYMS:
        out.append(name.replace(center, CENTER_SYNONYMS[center]))
    return out


def main():
    out_dir = sys.argv[1]
    os.makedirs(out_dir, exist_ok=True)
    rng = random.Random(SEED)
    entries = build_vocab(rng)
    children = [e for e in entries if len(e[0]) > 5]

    rng.shuffle(children)
    seen = children[: len(children) // 2]
    unseen = children[len(children) // 2:]

    train = []
    for code, name, region, center in seen:
        for v in rng.sample(variants(name, center), 2 if rng.random() < 0.6 else 1):
            train.append((v, name, code))
    rng.shuffle(train)
    train = train[:145]
    # A few multi-gold records.
    multi = []
    for i in range(5):
        a, b = seen[2 * i], seen[2 * i + 1]
        multi.append((a[1] + "伴" + b[1], a[1] + "##" + b[1], a[0] + "##" + b[0]))

    train_names = {t[0] for t in train}
    valid = []
    for code, name, region, center in unseen[:35]:
        valid.append((rng.choice(variants(name, center)), name))
    for code, name, region, center in seen[10:25]:
        choices = [v for v in variants(name, center) if v not in train_names]
        valid.append((rng.choice(choices), name))

    with open(os.path.join(out_dir, "icd.tsv"), "w", encoding="utf-8") as f:
        for code, name, _, _ in sorted(entries):
            f.write(f"{code}\t{name}\n")
    with open(os.path.join(out_dir, "train.tsv"), "w", encoding="utf-8") as f:
        for u, s, c in train + multi:
            f.write(f"{u}\t{s}\t{c}\n")
    with open(os.path.join(out_dir, "valid.tsv"), "w", encoding="utf-8") as f:
        for u, s in valid:
            f.write(f"{u}\t{s}\n")
    with open(os.path.join(out_dir, "region_tree.tsv"), "w", encoding="utf-8") as f:
        for _, group, organs in GROUPS:
            for organ in organs:
                f.write(f"{organ}\t{SUBREGIONS.get(organ, group)}\n")
            f.write(f"{group}\t全身\n")
    regions = sorted({g for _, g, _ in GROUPS} |
                     {o for _, _, os_ in GROUPS for o in os_} | {"全身"})
    for fname, items in (("centers.txt", CENTERS), ("regions.txt", regions),
                         ("characteristics.txt", CHARACTERISTICS)):
        with open(os.path.join(out_dir, fname), "w", encoding="utf-8") as f:
            f.write("\n".join(items) + "\n")
    print(f"{len(entries)} vocabulary names, {len(train) + len(multi)} seed "
          f"records, {len(valid)} held-out queries")


if __name__ == "__main__":
    main()
