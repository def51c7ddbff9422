"""Static bilingual instruction content served to rating clients."""
from __future__ import annotations

from ..termbase import RATING_CATEGORIES, RATING_SCALE

# everyday word-pair examples anchoring each scale point
SCALE_WORD_PAIRS = {
    4: [["midday", "noon"], ["motherboard", "mainboard"]],
    3: [["lion", "zebra"], ["firefighter", "policeman"]],
    2: [["house", "window"], ["airplane", "pilot"]],
    1: [["software", "keyboard"], ["driver", "suspension"]],
    0: [["pencil", "frog"], ["PlayStation", "monarchy"]],
}

_TASK_TEXT = {
    "en": {
        "title": "Your task",
        "steps": [
            "You will see two concepts side by side. Each concept is shown "
            "with one or several terms and a definition.",
            "Read the information on both concepts carefully.",
            "Rate the semantic similarity of both concepts on the scale "
            "from 0 to 4. Try to rate all pairs consistently.",
        ],
        "sample_note": "A concept is presented like this:",
    },
    "de": {
        "title": "Ihre Aufgabe",
        "steps": [
            "Ihnen werden zwei Begriffe nebeneinander angezeigt. Jeder "
            "Begriff besteht aus einer oder mehreren Benennungen und einer "
            "Definition.",
            "Lesen Sie die Angaben zu beiden Begriffen sorgfältig.",
            "Bewerten Sie die inhaltliche Ähnlichkeit beider Begriffe auf "
            "der Skala von 0 bis 4. Versuchen Sie, alle Paare einheitlich "
            "zu bewerten.",
        ],
        "sample_note": "Ein Begriff wird so dargestellt:",
    },
}

_SCALE_TITLE = {"en": "The rating scale", "de": "Die Bewertungsskala"}
_EXAMPLES_TITLE = {
    "en": "Additional domain examples (optional)",
    "de": "Weitere Beispiele aus dem Fachgebiet (optional)",
}

SAMPLE_CONCEPT = {
    "terms": ["risk"],
    "definition": "combination of the probability of occurrence of harm "
                  "and the severity of that harm",
}


def instructions_payload(language: str, example_sets: tuple[dict, ...] = ()) -> dict:
    """Three-part instruction flow: task, scale, optional example sets."""
    if language not in RATING_SCALE:
        raise KeyError(f"unsupported language {language!r}")
    task = _TASK_TEXT[language]
    scale_points = [
        {
            "category": category,
            "label": RATING_SCALE[language][category][0],
            "description": RATING_SCALE[language][category][1],
            "word_pairs": SCALE_WORD_PAIRS[category],
        }
        for category in sorted(RATING_CATEGORIES, reverse=True)
    ]
    return {
        "language": language,
        "parts": [
            {
                "id": "task",
                "title": task["title"],
                "steps": task["steps"],
                "sample_note": task["sample_note"],
                "sample_concept": SAMPLE_CONCEPT,
            },
            {
                "id": "scale",
                "title": _SCALE_TITLE[language],
                "points": scale_points,
            },
            {
                "id": "domain_examples",
                "title": _EXAMPLES_TITLE[language],
                "optional": True,
                "collapsed": True,
                "sets": list(example_sets),
            },
        ],
        "confirmation_required": True,
    }
