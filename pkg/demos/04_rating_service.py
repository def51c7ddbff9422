"""Drive a rating-collection session end to end, including a restart.

Shows registration with a recruitment code, the fixed randomized item
order with interleaved control pairs, postponement, the no-edit rule, and
that an append-only event log survives a service restart.
"""
import tempfile
from pathlib import Path

from termharmony.ratesvc import RatingService, ServiceConfig, ServiceError
from termharmony.termbase import EntryCorpus, RatingPair, TerminologicalEntry

entries = [
    TerminologicalEntry("a1", ("risk",), "combination of likelihood and severity", "demo"),
    TerminologicalEntry("a2", ("hazard",), "potential source of harm", "demo"),
    TerminologicalEntry("a3", ("threat",), "potential cause of an incident", "demo"),
    TerminologicalEntry("a4", ("asset",), "item of value to be protected", "demo"),
    TerminologicalEntry("w1", ("midday",), "the middle of the day", "dictionary"),
    TerminologicalEntry("w2", ("noon",), "twelve o'clock in the day", "dictionary"),
]
config = ServiceConfig(
    codes=frozenset({"demo-code"}),
    corpus=EntryCorpus(entries),
    dataset_pairs=(
        RatingPair("d1", "a1", "a2"),
        RatingPair("d2", "a1", "a3"),
        RatingPair("d3", "a2", "a4"),
        RatingPair("d4", "a3", "a4"),
    ),
    control_pairs=(RatingPair("c1", "w1", "w2", "control", intended_rating=4),),
    seed=7,
)

log_path = Path(tempfile.mkdtemp()) / "events.jsonl"
service = RatingService(config, log_path)

rater = service.register("demo-code")
print("registered:", rater)
print("item order:", service.item_order(rater))

service.confirm_instructions(rater)
item = service.next_item(rater)
print("\nfirst pair:", item["pair_id"])
print("  left :", item["left"]["terms"], "-", item["left"]["definition"])
print("  right:", item["right"]["terms"], "-", item["right"]["definition"])

service.postpone(rater, item["pair_id"])
print("postponed", item["pair_id"], "- it will replay at the end")

while True:
    item = service.next_item(rater)
    if item is None:
        break
    service.submit_rating(rater, item["pair_id"], 2)
    print(f"rated {item['pair_id']} -> 2  "
          f"(progress {service.progress(rater)['rated']}/5)")

try:
    service.submit_rating(rater, "d1", 4)
except ServiceError as err:
    print("re-rating rejected:", err.code)

service.close()
revived = RatingService(config, log_path)
print("\nafter restart, progress:", revived.progress(rater))
dataset_tsv, controls_tsv = revived.export_dataset()
print("\nexported dataset file:")
print(dataset_tsv)
print("exported control performance:")
print(controls_tsv)
