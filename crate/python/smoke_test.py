"""Smoke test for the `wisard` extension module.

Build and install it first, e.g. `pip install ./crates/python`, then run
`python python/smoke_test.py`.
"""

import json
import os
import tempfile

import wisard

E = [[1, 1, 1], [1, 0, 0], [1, 1, 1], [1, 0, 0], [1, 1, 1]]
T = [[1, 1, 1], [0, 1, 0], [0, 1, 0], [0, 1, 0], [0, 1, 0]]


def flipped(rows, x, y):
    out = [list(r) for r in rows]
    out[y][x] ^= 1
    return out


def main():
    m = wisard.Model(3, 5, 3, seed=7)
    assert m.labels == []
    assert m.classify(E).decision == "unknown"

    m.train(E, "E")
    m.train(T, "T")
    assert m.examples_per_label() == {"E": 1, "T": 1}

    out = m.classify(E)
    assert out.decision == "E" and not out.unknown, out
    assert out.scores["E"] == 5
    assert out.trace[0][0] == 1

    # Each pixel belongs to exactly one tuple, so one flip costs one neuron.
    assert m.responses(flipped(E, 1, 1))["E"] == 4
    assert m.classify(E, min_score=6).unknown

    assert m.mental_image("E") == E
    pgm = m.mental_image_pgm("E")
    assert pgm.startswith(b"P5\n3 5\n255\n")
    neurons = m.neurons("E")
    assert len(neurons) == 5 and all(len(n) == 1 for n in neurons)
    assert all(len(addr) == 3 and c == 1 for n in neurons for addr, c in n.items())

    doc = json.loads(m.to_json())
    assert doc["format_version"] == 1
    again = wisard.Model.from_json(m.to_json())
    assert again.to_json() == m.to_json()

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "m.json")
        m.save(path)
        loaded = wisard.Model.load(path)
        assert loaded.classify(T).decision == "T"

        img = os.path.join(tmp, "e.pgm")
        with open(img, "wb") as f:
            f.write(b"P5\n3 5\n255\n" + bytes(0 if b else 255 for row in E for b in row))
        assert wisard.load_pgm_pattern(img, 3, 5) == E

    for bad in (lambda: wisard.Model(3, 5, 30), lambda: m.train([[1, 0]], "E"), lambda: m.train(E, "")):
        try:
            bad()
        except wisard.WisardError:
            pass
        else:
            raise AssertionError("expected WisardError")

    print("python smoke test ok:", repr(m))


if __name__ == "__main__":
    main()
