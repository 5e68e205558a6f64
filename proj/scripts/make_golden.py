#!/usr/bin/env python3
"""Writes the synthetic golden mini-corpus under data/golden/.

Three artists with 20 verses each, spread over five song files marked up the
way lyric archives do (metadata headers, chorus blocks, repetition markers,
section labels), plus iteration-tagged checkpoint verses for each artist.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data" / "golden"

RHYMES = {
    "mc_aurora": [
        ["night", "light", "bright", "flight", "sight", "right"],
        ["sky", "high", "fly", "eye", "why", "by"],
        ["dream", "stream", "beam", "seem", "team", "gleam"],
        ["stars", "cars", "bars", "scars", "mars", "guitars"],
    ],
    "dj_basalt": [
        ["stone", "bone", "throne", "zone", "own", "grown"],
        ["street", "beat", "heat", "feet", "concrete", "defeat"],
        ["block", "clock", "rock", "stock", "lock", "shock"],
        ["grind", "mind", "blind", "find", "kind", "behind"],
    ],
    "kid_cinder": [
        ["fire", "wire", "higher", "desire", "liar", "choir"],
        ["flame", "game", "name", "fame", "same", "blame"],
        ["ash", "cash", "flash", "crash", "dash", "clash"],
        ["smoke", "broke", "spoke", "joke", "woke", "folk"],
    ],
}

WORDS = {
    "mc_aurora": (
        "i we they you ride over under across the a my our your moon "
        "planet glow silver quiet ocean wave chase drift float shine "
        "through into above comet orbit signal echo rise morning cold "
        "blue wide open window lantern far away galaxy satellite hum"
    ).split(),
    "dj_basalt": (
        "i we they you walk on in the a my our your corner city "
        "hustle pavement heavy hard pressure iron steel brick wall "
        "deep ground money hold stand tall never fold real raw cut "
        "gravel tunnel subway late shift paper grain weight old"
    ).split(),
    "kid_cinder": (
        "i we they you burn through with the a my our your spark "
        "ember heat red wild loud fast run spin break wreck scream "
        "torch crowd stage volume riot neon static shout jump wave "
        "gas match fuse pop bang pulse engine drum crackle"
    ).split(),
}

ARTISTS = list(RHYMES)


def line(rng, artist, end_word):
    body = [rng.choice(WORDS[artist]) for _ in range(rng.randint(5, 8))]
    return " ".join(body + [end_word])


def verse(rng, artist):
    lines = []
    for _ in range(rng.randint(4, 6)):
        family = rng.choice(RHYMES[artist])
        a, b = rng.sample(family, 2)
        lines.append(line(rng, artist, a))
        lines.append(line(rng, artist, b))
    return lines


def song(rng, artist, index):
    title = f"track {index + 1}"
    out = [
        f"Artist: {artist.replace('_', ' ').title()}",
        f"Album: Golden Sessions",
        f"Song: {title.title()}",
        "Typed by: golden@example.org",
        "",
    ]
    chorus = [line(rng, artist, rng.choice(RHYMES[artist][0])) for _ in range(2)]
    for v in range(4):
        out.append(f"[Verse {v + 1}]")
        body = verse(rng, artist)
        if v == 1:
            body[-1] = body[-1] + " (x2)"
        out.extend(body)
        out.append("")
        if v % 2 == 0:
            out.append("[Chorus]")
            out.extend(chorus)
            out.append("")
    out.append("*repeat chorus*")
    return "\n".join(out) + "\n"


def checkpoint_verse(rng, artist, iteration, corpus_lines):
    # Early checkpoints repeat a few tokens; later ones recombine training
    # lines more and more faithfully and grow longer.
    progress = iteration / 16000.0
    if iteration < 2000:
        filler = rng.choice(["yeah", "uh", "the", "yo"])
        return "\n".join(" ".join([filler] * rng.randint(3, 6)) for _ in range(3)) + "\n"
    n_lines = 2 + int(progress * 8)
    out = []
    for _ in range(n_lines):
        src = rng.choice(corpus_lines).split()
        keep = max(1, int(len(src) * progress))
        tail = [rng.choice(WORDS[artist]) for _ in range(len(src) - keep)]
        out.append(" ".join(src[:keep] + tail))
    return "\n".join(out) + "\n"


def main():
    rng = random.Random(20180801)
    for artist in ARTISTS:
        corpus_dir = ROOT / "corpus" / artist
        corpus_dir.mkdir(parents=True, exist_ok=True)
        corpus_lines = []
        for s in range(5):
            text = song(rng, artist, s)
            (corpus_dir / f"song_{s + 1:02d}.txt").write_text(text)
            corpus_lines.extend(
                l for l in text.splitlines()
                if l and not l.startswith(("[", "Artist", "Album", "Song", "Typed", "*"))
            )
        ckpt_dir = ROOT / "checkpoints" / artist
        ckpt_dir.mkdir(parents=True, exist_ok=True)
        for centre in range(0, 16001, 2000):
            for offset in (-100, 0, 100):
                it = centre + offset
                if it < 0:
                    continue
                (ckpt_dir / f"iter_{it}.txt").write_text(
                    checkpoint_verse(rng, artist, it, corpus_lines))

    roster = {
        "annotators": [
            {"id": "ann-1", "token": "token-ann-1"},
            {"id": "ann-2", "token": "token-ann-2"},
            {"id": "ann-3", "token": "token-ann-3"},
        ],
        "admin_token": "token-admin",
    }
    (ROOT / "roster.json").write_text(json.dumps(roster, indent=2) + "\n")

    config = {
        "corpus_root": "corpus",
        "artists": ARTISTS,
        "cleaning_rules": "../cleaning_rules.json",
        "dictionary": "../pronouncing.dict",
        "seed": 42,
        "baseline": {"verses_per_point": 5, "min_order": 1, "max_order": 9,
                     "max_tokens": 1100},
        "checkpoint_root": "checkpoints",
        "checkpoint_windows": {"first": 0, "last": 16000, "spacing": 2000,
                               "offsets": [100, 200, 300, 400]},
        "total_iterations": 16100,
        "pages": {"eval_verses_per_artist": 5, "min_eval_tokens": 40,
                  "line_task_verses_per_artist": 1, "generated_order": 3,
                  "distractors_per_page": 2, "min_pool_tokens": 40},
        "service": {"host": "127.0.0.1", "port": 8080, "roster": "roster.json"},
        "output_dir": "../../out/golden",
    }
    (ROOT / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main()
