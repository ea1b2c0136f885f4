#!/usr/bin/env python3
"""Line-by-line port of the chunk counting loop of conlleval.pl (CoNLL 2000).

Usage: reference_conlleval.py FILE [FILE ...]

Each input line is "token ... gold guess"; a blank line (or a first field of
"-X-") ends a sentence. For every file the script writes FILE.expected with
the summary numbers conlleval prints, rounded the same way ("%.2f").
"""

import sys

BOUNDARY = "-X-"


def end_of_chunk(prev_tag, tag, prev_type, type_):
    chunk_end = False
    if prev_tag == "B" and tag == "B":
        chunk_end = True
    if prev_tag == "B" and tag == "O":
        chunk_end = True
    if prev_tag == "I" and tag == "B":
        chunk_end = True
    if prev_tag == "I" and tag == "O":
        chunk_end = True
    if prev_tag == "E" and tag == "E":
        chunk_end = True
    if prev_tag == "E" and tag == "I":
        chunk_end = True
    if prev_tag == "E" and tag == "O":
        chunk_end = True
    if prev_tag == "I" and tag == "O":
        chunk_end = True
    if prev_tag != "O" and prev_tag != "." and prev_type != type_:
        chunk_end = True
    if prev_tag == "]":
        chunk_end = True
    if prev_tag == "[":
        chunk_end = True
    return chunk_end


def start_of_chunk(prev_tag, tag, prev_type, type_):
    chunk_start = False
    if prev_tag == "B" and tag == "B":
        chunk_start = True
    if prev_tag == "I" and tag == "B":
        chunk_start = True
    if prev_tag == "O" and tag == "B":
        chunk_start = True
    if prev_tag == "O" and tag == "I":
        chunk_start = True
    if prev_tag == "E" and tag == "E":
        chunk_start = True
    if prev_tag == "E" and tag == "I":
        chunk_start = True
    if prev_tag == "O" and tag == "E":
        chunk_start = True
    if prev_tag == "O" and tag == "I":
        chunk_start = True
    if tag != "O" and tag != "." and prev_type != type_:
        chunk_start = True
    if tag == "[":
        chunk_start = True
    if tag == "]":
        chunk_start = True
    return chunk_start


def split_tag(label):
    if "-" in label:
        tag, type_ = label.split("-", 1)
        return tag, type_
    return label, ""


def evaluate(lines):
    correct_chunk = found_correct = found_guessed = 0
    correct_tags = token_counter = 0
    in_correct = False
    last_correct, last_correct_type = "O", ""
    last_guessed, last_guessed_type = "O", ""
    n_features = -1
    for raw in lines:
        features = raw.split()
        if not features or features[0] == BOUNDARY:
            features = [BOUNDARY, "O", "O"]
        if n_features < 0:
            n_features = len(features)
        elif n_features != len(features) and features[0] != BOUNDARY:
            raise SystemExit("unexpected number of features: %r" % raw)
        guessed, guessed_type = split_tag(features.pop())
        correct, correct_type = split_tag(features.pop())
        first_item = features.pop(0)

        if in_correct:
            end_c = end_of_chunk(last_correct, correct, last_correct_type, correct_type)
            end_g = end_of_chunk(last_guessed, guessed, last_guessed_type, guessed_type)
            if end_c and end_g and last_guessed_type == last_correct_type:
                in_correct = False
                correct_chunk += 1
            elif end_c != end_g or guessed_type != correct_type:
                in_correct = False

        start_c = start_of_chunk(last_correct, correct, last_correct_type, correct_type)
        start_g = start_of_chunk(last_guessed, guessed, last_guessed_type, guessed_type)
        if start_c and start_g and guessed_type == correct_type:
            in_correct = True
        if start_c:
            found_correct += 1
        if start_g:
            found_guessed += 1
        if first_item != BOUNDARY:
            if correct == guessed and guessed_type == correct_type:
                correct_tags += 1
            token_counter += 1

        last_guessed, last_guessed_type = guessed, guessed_type
        last_correct, last_correct_type = correct, correct_type

    if in_correct:
        correct_chunk += 1

    precision = 100.0 * correct_chunk / found_guessed if found_guessed > 0 else 0.0
    recall = 100.0 * correct_chunk / found_correct if found_correct > 0 else 0.0
    fb1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    accuracy = 100.0 * correct_tags / token_counter if token_counter > 0 else 0.0
    return {
        "tokens": token_counter,
        "gold_chunks": found_correct,
        "guessed_chunks": found_guessed,
        "correct_chunks": correct_chunk,
        "accuracy": "%.2f" % accuracy,
        "precision": "%.2f" % precision,
        "recall": "%.2f" % recall,
        "fb1": "%.2f" % fb1,
    }


def main(paths):
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            result = evaluate(handle.read().split("\n"))
        with open(path + ".expected", "w", encoding="utf-8") as out:
            for key in ("tokens", "gold_chunks", "guessed_chunks", "correct_chunks",
                        "accuracy", "precision", "recall", "fb1"):
                out.write("%s %s\n" % (key, result[key]))


if __name__ == "__main__":
    main(sys.argv[1:])
