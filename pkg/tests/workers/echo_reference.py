"""Worker that answers with the reference summary: python echo_reference.py REFERENCES.jsonl"""
import json
import sys

refs = {}
with open(sys.argv[1], encoding="utf-8") as f:
    for line in f:
        if line.strip():
            rec = json.loads(line)
            refs[rec["id"]] = rec["summary"]
for line in sys.stdin:
    if line.strip():
        req = json.loads(line)
        print(json.dumps({"id": req["id"], "summary": refs[req["id"]]}))
