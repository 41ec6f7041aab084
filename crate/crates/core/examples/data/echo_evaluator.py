#!/usr/bin/env python3
"""Minimal JSON-lines evaluator: answers every eval with |S| / n.

Usage: echo_evaluator.py [--fail-after K] [--garbage-after K]
"""
import json
import sys


def main():
    fail_after = garbage_after = None
    args = sys.argv[1:]
    if "--fail-after" in args:
        fail_after = int(args[args.index("--fail-after") + 1])
    if "--garbage-after" in args:
        garbage_after = int(args[args.index("--garbage-after") + 1])

    n = None
    served = 0
    for line in sys.stdin:
        try:
            msg = json.loads(line)
        except ValueError:
            print(json.dumps({"type": "error", "detail": "malformed request"}), flush=True)
            continue
        kind = msg.get("type")
        if kind == "init":
            n = len(msg["channels"])
            print(json.dumps({"type": "ready"}), flush=True)
        elif kind == "eval":
            if fail_after is not None and served >= fail_after:
                sys.exit(3)
            if garbage_after is not None and served >= garbage_after:
                print("garbage", flush=True)
                continue
            served += 1
            print(json.dumps({"type": "result", "performance": len(msg["channels"]) / n}), flush=True)
        elif kind == "shutdown":
            return 0
        else:
            print(json.dumps({"type": "error", "detail": "unknown type %r" % kind}), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
