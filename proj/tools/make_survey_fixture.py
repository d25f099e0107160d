#!/usr/bin/env python3
"""Writes the reconstructed n=60 questionnaire fixture.

Counts per question are chosen to agree with the published percentages and
means; respondent order is shuffled with a fixed seed.
"""
import hashlib
import json
import random
import sys

N = 60

# question -> {likert value: count}
COUNTS = {
    "Q1_Bare": {5: 6, 4: 18, 3: 21, 2: 12, 1: 3},
    "Q2_ARLLM": {5: 28, 4: 20, 3: 12},
    "Q3_SEAR": {5: 46, 4: 12, 3: 2},
    "Relevance": {5: 36, 4: 18, 3: 6},
    "Appropriateness": {5: 33, 4: 22, 3: 5},
    "Naturalness": {5: 37, 4: 17, 3: 6},
    "Pacing": {5: 33, 4: 25, 3: 2},
    "Sincerity": {5: 32, 4: 25, 3: 3},
    "EmotionalProgression": {5: 30, 4: 24, 3: 6},
    "ARComfort": {5: 29, 4: 23, 3: 6, 2: 2},
    "BareWillingness": {5: 12, 4: 20, 3: 18, 2: 10},
    "FutureIntent": {5: 31, 4: 22, 3: 7},
    "Depth": {5: 30, 4: 28, 3: 2},
    "Acceptance": {5: 32, 4: 25, 3: 3},
    "PhotoLink": {5: 24, 4: 32, 3: 4},
    "SocialApp": {5: 26, 4: 30, 3: 4},
    "SMS": {5: 27, 4: 28, 3: 5},
    "PhoneCall": {5: 21, 4: 30, 3: 9},
    "TrustBefore": {5: 16, 4: 12, 3: 11, 2: 13, 1: 8},
    "TrustAfter": {5: 25, 4: 21, 3: 10, 2: 4},
}

SECTIONS = {
    "Q1_Bare": "BaselineComparison", "Q2_ARLLM": "BaselineComparison", "Q3_SEAR": "BaselineComparison",
    "PhotoLink": "SEEffectiveness", "SocialApp": "SEEffectiveness", "SMS": "SEEffectiveness",
    "PhoneCall": "SEEffectiveness", "TrustBefore": "SEEffectiveness", "TrustAfter": "SEEffectiveness",
}

FEEDBACK = [
    "The conversation felt surprisingly personal.",
    "It knew about my hobbies, which was a bit unsettling afterwards.",
    "Natural pacing, I did not notice anything odd.",
    "I would be more careful about links now.",
]


def pseudonym(i):
    return "P-" + hashlib.sha256(f"participant-{i}".encode()).hexdigest()[:8]


def main(path):
    rng = random.Random(20250101)
    people = [pseudonym(i) for i in range(N)]
    lines = []
    for qid, dist in COUNTS.items():
        values = [v for v, c in sorted(dist.items()) for _ in range(c)]
        assert len(values) == N, qid
        rng.shuffle(values)
        section = SECTIONS.get(qid, "SubjectiveExperience")
        for who, v in zip(people, values):
            lines.append({"participantPseudonym": who, "section": section, "questionId": qid, "value": v})
    for i, who in enumerate(people[: len(FEEDBACK) * 3]):
        lines.append({"participantPseudonym": who, "section": "OpenText", "questionId": "Feedback",
                      "value": FEEDBACK[i % len(FEEDBACK)]})
    with open(path, "w", encoding="utf-8") as f:
        for rec in lines:
            f.write(json.dumps(rec, ensure_ascii=False, separators=(",", ":")) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/survey/responses_n60.ndjson")
