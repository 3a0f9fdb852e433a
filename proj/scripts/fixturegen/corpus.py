"""Texts used for the committed fixtures.

Sentence boundaries are kept simple (". " followed by an uppercase letter) so
the regex splitter in make_fixtures.py agrees with the engine's splitter.
Pair 0 has a four-sentence document (leadword tests). Pair 9 is an
identical summary/document pair.
"""

PAIRS = [
    (
        "The city council approved a new budget on Monday. The plan adds money for parks and schools. "
        "Several members objected to the higher parking fees. The mayor said the vote was a fair compromise.",
        "The council approved a budget with more money for parks and schools.",
    ),
    (
        "Heavy rain flooded the river valley overnight. Hundreds of families left their homes before dawn. "
        "Rescue teams used boats to reach the farms.",
        "Floods forced families in the valley to leave their homes.",
    ),
    (
        "Dr. Smith left the hospital after a long shift. She returned the next morning to lead the team. "
        "The new clinic will open in the spring.",
        "Dr. Smith will lead the team at the new clinic.",
    ),
    (
        "The football club signed a young striker from Brazil. He scored twice in his first match. "
        "Fans sang his name as the team won the game.",
        "A young striker scored twice for the club in his first match.",
    ),
    (
        "Scientists found a new species of frog in the forest. The frog is small and bright green. "
        "It lives near cold mountain streams. The team hopes to protect its habitat.",
        "A small green frog was found near mountain streams.",
    ),
    (
        "The company reported strong sales of its new phone. Profits rose for the third quarter in a row. "
        "Shares climbed after the report.",
        "Strong phone sales lifted profits and shares.",
    ),
    (
        "A fire damaged the old library late on Friday. No one was hurt in the blaze. "
        "Firefighters saved most of the rare books.",
        "The library burned but most books were saved.",
    ),
    (
        "The school will start a free lunch program next year. The state will pay for the meals. "
        "Parents welcomed the news at a meeting.",
        "Parents welcomed a free lunch program paid by the state.",
    ),
    (
        "Train service between the two cities resumed on Sunday. Repairs to the bridge took three weeks. "
        "Officials thanked travelers for their patience.",
        "Trains are running again after three weeks of bridge repairs.",
    ),
    (
        "The museum opened a show of modern art. Visitors lined up around the block.",
        "The museum opened a show of modern art. Visitors lined up around the block.",
    ),
]

CAT_TEXT = "the cat sat on the mat"

# Harness benchmark dataset: five documents (two of them form a multi-document
# group) and four systems per unit.
BENCH_DOCS = [
    ("d0", PAIRS[0][0], None),
    ("d1", PAIRS[1][0], None),
    ("d2", PAIRS[3][0], None),
    ("d3", PAIRS[4][0], None),
    ("d4", PAIRS[5][0], "t1"),
    ("d5", PAIRS[6][0], "t1"),
]

BENCH_SUMMARIES = {
    "d0": [
        "The council approved a budget with more money for parks and schools.",
        "Members objected to parking fees.",
        "The mayor said the vote was fair. The budget adds money for schools.",
        "Rain flooded the city on Monday.",
    ],
    "d1": [
        "Floods forced families in the valley to leave their homes.",
        "Rescue teams used boats.",
        "Heavy rain flooded the valley and families left before dawn.",
        "The football team won the game.",
    ],
    "d2": [
        "A young striker scored twice for the club in his first match.",
        "Fans sang at the game.",
        "The club signed a striker from Brazil. He scored twice.",
        "Scientists found a frog.",
    ],
    "d3": [
        "A small green frog was found near mountain streams.",
        "The team hopes to protect the forest.",
        "Scientists found a new frog species. It is bright green.",
        "Profits rose for the third quarter.",
    ],
    "d4": [
        "Strong phone sales lifted profits while a fire damaged the library.",
        "Shares climbed after the report.",
        "Firefighters saved most of the rare books.",
        "The museum opened a show.",
    ],
}

# Sentences used to train the mini NLI classifier, in addition to the corpus.
NLI_EXTRA = [
    "The dog ran in the park.",
    "The weather was cold and wet.",
    "The store closed early on Sunday.",
    "A student won the science prize.",
]
