"""
Line-protocol stub used by the external classifier tests.

Modes:
    fixed       answer every request with scores (0.2, 0.8)
    wrong-id    answer with an id that does not match the request
    die         exit without answering the first request
    nan         answer with a non-finite score
    bad-hello   send a malformed handshake
    silent      send nothing at all
    garbage     answer with a line that is not JSON
    slow-once   answer the first request only after SLOW_SECONDS
"""
import json
import sys
import time

SLOW_SECONDS = 1.5


def send(payload):
    sys.stdout.write(json.dumps(payload) + "\n")
    sys.stdout.flush()


def main(mode: str) -> int:
    if mode == "silent":
        time.sleep(30)
        return 0
    if mode == "bad-hello":
        send({"greeting": 2})
        return 0
    send({"hello": {"classes": 2}})
    for count, line in enumerate(sys.stdin):
        request = json.loads(line)
        if mode == "slow-once" and count == 0:
            time.sleep(SLOW_SECONDS)
        if mode == "die":
            return 3
        if mode == "wrong-id":
            send({"id": request["id"] + 1000, "scores": [0.2, 0.8]})
        elif mode == "nan":
            sys.stdout.write(json.dumps({"id": request["id"], "scores": [float("nan"), 1.0]}) + "\n")
            sys.stdout.flush()
        elif mode == "garbage":
            sys.stdout.write("not json\n")
            sys.stdout.flush()
        else:
            send({"id": request["id"], "scores": [0.2, 0.8]})
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1] if len(sys.argv) > 1 else "fixed"))
