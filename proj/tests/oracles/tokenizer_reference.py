#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Reference tokenization of the tokenizer fixtures.

Whitespace mode is a single regular expression over bytes:
words are runs of [A-Za-z0-9_] or bytes >= 0x80, every other
non-space byte is a token of its own. Vocab mode segments each
word greedily by the longest vocabulary piece, falling back to
one UTF-8 code point.

Writes tests/data/tokenizer_expected.json and the 100-token fixture.
"""
import json
import pathlib
import re

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
TOKEN = re.compile(rb"[A-Za-z0-9_\x80-\xff]+|[^A-Za-z0-9_\x80-\xff \t\n\v\f\r]")
WORD = re.compile(rb"[A-Za-z0-9_\x80-\xff]+")


def whitespace_tokens(data: bytes):
    return [(m.start(), m.end()) for m in TOKEN.finditer(data)]


def utf8_len(lead: int) -> int:
    if lead < 0x80:
        return 1
    if lead >> 5 == 0b110:
        return 2
    if lead >> 4 == 0b1110:
        return 3
    if lead >> 3 == 0b11110:
        return 4
    return 1


def vocab_tokens(data: bytes, vocab):
    longest = max(len(p) for p in vocab)
    out = []
    for start, end in whitespace_tokens(data):
        if not WORD.fullmatch(data[start:end]):
            out.append((start, end))
            continue
        pos = start
        while pos < end:
            take = 0
            for length in range(min(longest, end - pos), 0, -1):
                if data[pos:pos + length] in vocab:
                    take = length
                    break
            if take == 0:
                take = min(utf8_len(data[pos]), end - pos)
            out.append((pos, pos + take))
            pos += take
    return out


def prefix(data: bytes, spans, k):
    if k == 0:
        return b""
    if len(spans) <= k:
        return data
    return data[: spans[k - 1][1]]


def main():
    paragraph = (DATA / "fixture_paragraph.txt").read_bytes()
    vocab = {line.strip(b"\r") for line in (DATA / "vocab.txt").read_bytes().split(b"\n") if line.strip(b"\r")}

    ws = whitespace_tokens(paragraph)
    vb = vocab_tokens(paragraph, vocab)

    # Fixture holding exactly 100 whitespace tokens.
    fixture100 = prefix(paragraph, ws, 100)
    (DATA / "fixture_100_tokens.txt").write_bytes(fixture100)
    assert len(whitespace_tokens(fixture100)) == 100

    p64 = prefix(fixture100, ws, 64)
    expected = {
        "paragraph_whitespace_count": len(ws),
        "paragraph_vocab_count": len(vb),
        "fixture100_count": 100,
        "fixture100_prefix64": p64.decode("utf-8"),
        "fixture100_prefix64_bytes": len(p64),
        "paragraph_vocab_prefix64": prefix(paragraph, vb, 64).decode("utf-8", errors="surrogateescape"),
        "paragraph_whitespace_first_tokens": [paragraph[s:e].decode("utf-8") for s, e in ws[:12]],
    }
    (DATA / "tokenizer_expected.json").write_text(json.dumps(expected, indent=2, ensure_ascii=False) + "\n")
    print(json.dumps({k: v for k, v in expected.items() if "count" in k or "bytes" in k}))


if __name__ == "__main__":
    main()
