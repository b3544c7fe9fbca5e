"""A stand-in for a database command-line client, backed by the reference engine.

    fake_client.py STATE_DIR NAMESPACE [--down]

Reads one statement on stdin, keeps tables in STATE_DIR/NAMESPACE.pkl and
appends every received text to STATE_DIR/NAMESPACE.log.  Output imitates a
psql-style client; errors go to stderr with exit status 1.
"""
import pickle
import sys
from pathlib import Path

from sdbtest.adapters import EngineError, ReferenceAdapter


def main() -> int:
    state_dir, namespace = Path(sys.argv[1]), sys.argv[2]
    if "--down" in sys.argv:
        print("psql: error: could not connect to server: Connection refused", file=sys.stderr)
        return 2
    text = sys.stdin.read()
    with open(state_dir / f"{namespace}.log", "a") as fh:
        fh.write(text + "\n")
    state = state_dir / f"{namespace}.pkl"
    engine = ReferenceAdapter()
    if state.exists():
        engine.tables = pickle.loads(state.read_bytes())
    try:
        out = engine.execute(text)
    except EngineError as exc:
        print(f"ERROR:  {exc.message}", file=sys.stderr)
        return 1
    state.write_bytes(pickle.dumps(engine.tables))
    if out is not None:
        print(" count \n-------\n" + f" {out:>5}\n(1 row)\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
