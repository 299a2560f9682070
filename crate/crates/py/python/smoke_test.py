"""Quick check of the Python bindings against the bundled examples.

Run after `pip install --no-build-isolation ./crates/py`:

    python crates/py/python/smoke_test.py
"""

import os
import tempfile

import nebfca


def main():
    ws = nebfca.Workspace.demo()
    assert ws.contexts() == ["catalogue", "documents", "marvel", "reader", "universe"]

    docs = ws.context("documents")
    assert len(docs) == 5
    assert docs.value("plan2.doc", "format") is None
    assert docs.query("project=plan2 & format=text") == ["notes1.txt", "notes2.txt"]

    ctx = docs.scale()
    assert sorted(ctx.attributes) == ["format=postscript", "format=text", "project=plan1", "project=plan2"]
    assert len(ctx.pairs()) == 9

    lat = ctx.lattice()
    assert len(lat) == 7
    assert len(lat.covers()) == 9
    assert lat.depth(lat.top) == 0

    assert nebfca.FormalContext.from_cxt(ctx.to_cxt()) == ctx
    _, merged = ctx.purify()
    assert merged == [["notes1.txt", "notes2.txt"]]

    universe = ws.system("universe")
    assert universe.resolve("Plan2") == ["plan2.ps", "plan2.doc", "notes1.txt", "notes2.txt"]
    assert len(universe.extended_context().lattice()) == 11

    session = nebfca.BrowseSession(ctx)
    assert len(session.neighborhood("plan2.ps")) == 4
    assert len(session.neighborhood("plan2.ps", threshold=2)) == 3
    assert len(session.neighborhood("format=text")) == 2

    shared = ws.shared()
    pairs = set(shared.cross_instantiation())
    assert ("marvel/baa-95-18", "catalogue/Military:ARPA") in pairs
    assert ("marvel/baa-95-18", "catalogue/Military") in pairs
    assert len(shared.resolve("reader/NuclearWaste")) == 4

    try:
        docs.query("colour=red")
    except KeyError:
        pass
    else:
        raise AssertionError("unknown tag accepted")
    try:
        docs.query("format=")
    except ValueError:
        pass
    else:
        raise AssertionError("syntax error accepted")

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "ws.json")
        ws.save(path)
        assert nebfca.Workspace.load(path).to_json() == ws.to_json()

    print("smoke test passed")


if __name__ == "__main__":
    main()
