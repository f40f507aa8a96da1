"""Drive the HTTP session service end-to-end, in process.

A session is an append-only, checksum-chained event log plus the audit state
that is its deterministic replay.  This demo creates a 3-candidate session,
streams a landslide sample until the outcome certifies, then prints the tail
of the event log.

Run:  python3 demos/03_live_session.py
"""

import tempfile

from fastapi.testclient import TestClient

from awaire.service import create_app

with tempfile.TemporaryDirectory() as data_dir:
    client = TestClient(create_app(data_dir))
    created = client.post("/sessions", json={
        "ballot_manifest": {"roster": ["Alice", "Bob", "Carol"], "B": 200},
        "reported_winner": "Alice",
        "config": {"alpha": 0.05, "scheme": "largest", "update_every": 25},
    }).json()
    sid = created["session_id"]
    print(f"session {sid}: {len(created['status']['orders'])} alt-orders "
          f"to reject at alpha=0.05")

    # a stream heavily favouring Alice (with some noise) should certify
    sample = (["Alice", "Alice", "Alice", "Bob", "Alice", "Carol"] * 34)[:200]
    status = None
    for name in sample:
        r = client.post(f"/sessions/{sid}/ballots", json={"ranking": [name]})
        if r.status_code != 200:
            break
        status = r.json()
        if status["decision"] != "ongoing":
            break

    print(f"decision after {status['t']} ballots: {status['decision']}")
    for o in status["orders"]:
        print(f"  order {o['order']}: rejected={o['rejected']} "
              f"log_e={o['log_e']}")

    log = client.get(f"/sessions/{sid}/log").text.strip().splitlines()
    print(f"\nevent log: {len(log)} records, last two:")
    for line in log[-2:]:
        print(" ", line[:120] + ("..." if len(line) > 120 else ""))
