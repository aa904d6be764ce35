"""Regenerates the packaged seed assets from the authored corpus below.

Produces, under src/leveltext/data/:
  seed_corpus.jsonl   30 articles (10 topic sets x 3 levels) with scores
  default_freq.tsv    word counts over all 30 texts
  default_model.txt   scorer calibrated on the seed corpus

Labels are assigned from fixed reference coefficients, the shipped model is
re-derived by calibrate() so the packaged scorer reflects the real
calibration path, and the stored article scores are produced by that shipped
model.  The last step makes the corpus self-consistent: rescoring any seed
article with the packaged model reproduces its stored score bit-for-bit.

Run from the repository root:  python3 scripts/build_seed_assets.py
"""

import json
import math
from pathlib import Path

from leveltext.readability import calibrate, score
from leveltext.textproc import (
    build_frequency_table,
    mean_log_word_frequency,
    mean_sentence_length,
    tokenize,
)

# Reference coefficients: positive weight on sentence length, negative weight
# on word frequency (rarer vocabulary pushes the score up), offset chosen so
# the seed texts land well inside the 0..2000 clamp.
REF_ALPHA = 250.0
REF_BETA = -450.0
REF_GAMMA = -550.0

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "leveltext" / "data"

# (set_id, title, [level-1 text, level-2 text, level-3 text])
SEED_SETS = [
    (
        1,
        "Rain",
        [
            "The rain falls. The water runs. The sun comes out.",
            "Rain falls from dark clouds and wets the ground. The water runs"
            " into small streams. Later the sun comes out and dries the land.",
            "Precipitation descends from saturated clouds and gathers across"
            " the terrain. The accumulated moisture converges into rivulets"
            " that feed larger waterways. Eventually solar radiation"
            " evaporates the remaining dampness and restores the land.",
        ],
    ),
    (
        2,
        "Bees",
        [
            "Bees live in hives. They make sweet honey. They fly to many"
            " flowers. They work all day.",
            "Honeybees live together in large hives and make honey from"
            " flower nectar. Each bee visits hundreds of flowers in a single"
            " day. The hive stores the honey to eat during the cold winter.",
            "Honeybee colonies inhabit intricate hives where thousands of"
            " workers transform gathered nectar into honey. A single forager"
            " may visit several hundred blossoms during one excursion,"
            " carrying pollen between them. The colony accumulates"
            " substantial reserves so that it can survive prolonged winter"
            " scarcity.",
        ],
    ),
    (
        3,
        "Volcanoes",
        [
            "A volcano is a hot mountain. Hot rock comes out of the top. The"
            " rock cools and gets hard.",
            "A volcano forms where melted rock rises from deep inside the"
            " earth. When the pressure grows too strong, the melted rock"
            " bursts out of the top. The flowing rock cools slowly and"
            " hardens into new ground.",
            "Volcanoes originate where molten material ascends through"
            " fractures in the planet's crust. Accumulating pressure"
            " eventually propels this magma through a vent, producing"
            " eruptions of lava and ash. Successive eruptions deposit layered"
            " material that gradually constructs the mountain's"
            " characteristic cone.",
        ],
    ),
    (
        4,
        "The Moon",
        [
            "The moon moves around the earth. It shines at night. Its light"
            " comes from the sun.",
            "The moon travels around the earth about once a month. It makes"
            " no light of its own. Instead its surface reflects light that"
            " comes from the sun.",
            "The moon completes an orbit around the earth roughly every"
            " twenty nine days, and its appearance changes throughout that"
            " cycle. Lacking any illumination of its own, the lunar surface"
            " merely reflects incident sunlight. Observers therefore see"
            " phases as the angle between the sun, the moon, and the earth"
            " shifts.",
        ],
    ),
    (
        5,
        "Spiders",
        [
            "Spiders spin webs. The webs catch small bugs. Then the spiders"
            " eat the bugs.",
            "Most spiders spin silk webs to catch insects for food. The silk"
            " comes from special organs at the back of the body. When an"
            " insect lands in the web, the spider feels the threads move.",
            "Many spiders construct elaborate silken webs that ensnare unwary"
            " insects. Specialized glands extrude the silk, which combines"
            " remarkable strength with elasticity. Vibrations traveling along"
            " the threads alert the resident spider to struggling prey almost"
            " instantly.",
        ],
    ),
    (
        6,
        "Glaciers",
        [
            "A glacier is a big river of ice. It moves very slowly. It can"
            " carve deep valleys.",
            "Glaciers are huge sheets of ice that form where snow never fully"
            " melts. Year after year the snow packs down into solid ice. The"
            " heavy ice slides slowly downhill and carves the land beneath"
            " it.",
            "Glaciers develop in regions where annual snowfall persistently"
            " exceeds melting, compacting over decades into dense ice. Under"
            " its own immense weight the ice deforms and creeps downslope."
            " This gradual movement abrades underlying bedrock, excavating"
            " broad valleys and depositing ridges of debris.",
        ],
    ),
    (
        7,
        "Seeds",
        [
            "A seed waits in the ground. Rain makes it wake up. A small plant"
            " grows out. The plant reaches for the sun.",
            "A seed rests in the soil until water and warmth arrive. The"
            " outer coat softens and a tiny root pushes down. A green shoot"
            " then rises toward the light and unfolds its first leaves.",
            "A dormant seed persists in the soil until moisture and warmth"
            " trigger germination. Its protective coat ruptures as the"
            " embryonic root descends to anchor the seedling. The emerging"
            " shoot elongates toward available light, deploying initial"
            " leaves to commence photosynthesis.",
        ],
    ),
    (
        8,
        "Trains",
        [
            "Trains run on long rails. They carry people and goods. They can"
            " go very fast.",
            "Trains travel on steel rails that stretch between cities. They"
            " carry passengers and heavy freight at the same time. A modern"
            " train can cross a whole country in a day.",
            "Railways convey passengers and freight along continuous steel"
            " corridors linking distant cities. Because steel wheels on"
            " smooth rails generate minimal friction, trains haul enormous"
            " loads efficiently. Contemporary express services traverse"
            " entire countries within a single day.",
        ],
    ),
    (
        9,
        "Coral",
        [
            "Coral lives in warm seas. Many tiny animals build it. Fish hide"
            " inside it.",
            "Coral reefs grow in warm shallow seas near the coast. Millions"
            " of tiny animals build stony homes that join together. The reef"
            " gives food and shelter to many kinds of fish.",
            "Coral reefs arise in warm shallow waters where countless minute"
            " polyps secrete limestone skeletons. These accumulating"
            " structures fuse into expansive reefs over centuries. The"
            " resulting habitat sustains extraordinary biodiversity,"
            " furnishing nourishment and refuge for innumerable marine"
            " species.",
        ],
    ),
    (
        10,
        "Bridges",
        [
            "A bridge goes over a river. Cars and people cross it. Strong"
            " parts hold it up.",
            "Bridges let roads cross rivers and deep valleys. Strong beams or"
            " tall towers hold the weight of the traffic. Engineers check"
            " each part so the bridge stays safe.",
            "Bridges carry roads and railways across rivers, gorges, and"
            " other obstacles. Their decks rest on arrangements of beams,"
            " arches, or suspension cables that distribute enormous loads"
            " into the ground. Engineers routinely inspect these components,"
            " since undetected deterioration could compromise the entire"
            " structure.",
        ],
    ),
]


def main() -> None:
    texts = [text for _, _, level_texts in SEED_SETS for text in level_texts]
    freq = build_frequency_table(texts)

    labeled = []
    for _, _, level_texts in SEED_SETS:
        for text in level_texts:
            t = tokenize(text)
            label = (
                REF_ALPHA * math.log10(mean_sentence_length(t))
                + REF_BETA * mean_log_word_frequency(t, freq)
                + REF_GAMMA
            )
            assert 0.0 < label < 2000.0, f"label {label:.1f} would clamp"
            labeled.append((text, label))

    model = calibrate(labeled, freq, freq_table_ref="default_freq.tsv")

    records = []
    for set_id, title, level_texts in SEED_SETS:
        for article_id, text in enumerate(level_texts, start=1):
            records.append(
                {
                    "set_id": set_id,
                    "article_id": article_id,
                    "title": title,
                    "text": text,
                    "score": score(text, model, freq).score,
                }
            )

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    with (DATA_DIR / "seed_corpus.jsonl").open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    freq.save(DATA_DIR / "default_freq.tsv")
    model.save(DATA_DIR / "default_model.txt")

    scores = [r["score"] for r in records]
    print(f"{len(records)} articles, {freq.total} tokens, {len(freq.entries)} distinct")
    print(f"labels span {min(scores):.1f} .. {max(scores):.1f}")
    print(
        f"calibrated alpha={model.alpha:.6f} beta={model.beta:.6f} "
        f"gamma={model.gamma:.6f} rmse={model.fit_rmse:.2e} r2={model.fit_r2:.6f}"
    )


if __name__ == "__main__":
    main()
