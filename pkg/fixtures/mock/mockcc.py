#!/usr/bin/env python3
"""Stand-in compiler for exercising the harness without a real toolchain.

Usage: mockcc.py [flags...] SOURCE -o OUTPUT

Behaviour is driven by marker comments in SOURCE:

    MOCK-COMPILE: fail [message]   exit 1, message on stderr
    MOCK-COMPILE: sleep SECONDS    sleep before "compiling"
    MOCK-RUN: exit CODE            produced binary exits with CODE (default 0)
    MOCK-RUN: sleep SECONDS        produced binary sleeps first

The "binary" is a small Python script, so the mock works anywhere Python does.
"""
import os
import re
import stat
import sys
import time


def main(argv):
    if "-o" not in argv:
        print("mockcc: missing -o", file=sys.stderr)
        return 2
    out = argv[argv.index("-o") + 1]
    sources = [a for a in argv if a.endswith((".c", ".cpp", ".cc", ".f90", ".F90"))]
    if not sources:
        print("mockcc: no input files", file=sys.stderr)
        return 2
    with open(sources[0]) as f:
        text = f.read()

    for kind, arg in re.findall(r"MOCK-COMPILE:\s*(\w+)\s*(.*)", text):
        if kind == "sleep":
            time.sleep(float(arg))
        elif kind == "fail":
            print(f"{sources[0]}: error: {arg.strip() or 'compilation failed'}", file=sys.stderr)
            return 1

    code, sleep = 0, 0.0
    for kind, arg in re.findall(r"MOCK-RUN:\s*(\w+)\s*(\S*)", text):
        if kind == "exit":
            code = int(arg)
        elif kind == "sleep":
            sleep = float(arg)

    with open(out, "w") as f:
        f.write(f"#!{sys.executable}\n"
                "import sys, time\n"
                f"time.sleep({sleep!r})\n"
                f"print('mock test {os.path.basename(sources[0])}')\n"
                f"sys.exit({code})\n")
    os.chmod(out, os.stat(out).st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    print(f"mockcc: {sources[0]} -> {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
