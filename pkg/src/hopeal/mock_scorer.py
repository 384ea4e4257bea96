"""Fixed-table mock scorer speaking the al-scorer line protocol.

Serves probabilities looked up from a JSON table mapping raw text to a
``[p_not_hope, p_hope]`` pair.  Used to test the protocol and to drive
the active-learning loop without any real model:

    python -m hopeal.mock_scorer --table probs.json
"""

from __future__ import annotations

import argparse
import json
import sys


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hopeal-mock-scorer")
    parser.add_argument("--table", required=True, help="JSON file: text -> [p0, p1]")
    parser.add_argument(
        "--default",
        default=None,
        help='fallback pair "p0,p1" for texts missing from the table',
    )
    args = parser.parse_args(argv)

    with open(args.table, encoding="utf-8") as fh:
        table = json.load(fh)
    fallback = None
    if args.default is not None:
        parts = args.default.split(",")
        fallback = [float(parts[0]), float(parts[1])]

    stdout = sys.stdout
    stdout.write('{"protocol":"al-scorer","version":1}\n')
    stdout.flush()

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        request = json.loads(line)
        probs = []
        for text in request["texts"]:
            pair = table.get(text, fallback)
            if pair is None:
                print(f"no probabilities for text: {text!r}", file=sys.stderr)
                return 1
            probs.append(pair)
        stdout.write(
            json.dumps(
                {"request_id": request["request_id"], "probs": probs},
                separators=(",", ":"),
            )
        )
        stdout.write("\n")
        stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
