"""Regenerates the sample lexicons and the synthetic embedding table.

    python3 fixtures/generate.py

Output is deterministic for a fixed numpy version.
"""

import json
import pathlib

import numpy as np

HERE = pathlib.Path(__file__).resolve().parent

MVP_PARAGRAPHS = [
    ("intro",
     "Two years ago our team travelled to the farming village of Kanyemba to see what a small grant "
     "could change. The village had eleven hundred people, one road, and very little money."),
    ("Hospital",
     "The village clinic was in bad shape. Patients slept two to a bed and some waited on the floor. "
     "There was no doctor on staff, only a nurse who came twice a week. The building had no electricity "
     "and no running water, so medicine spoiled and supplies ran out."),
    ("Malaria",
     "Malaria was the most common illness. Mosquitoes spread it at night, and children under five were "
     "hit the hardest. A treated bed net costs about $5 and protects a family for years, yet most homes "
     "had none. Volunteers handed out 900 nets in the first month."),
    ("Farming",
     "Most families grew maize on tired soil. Without fertilizer and good seeds a harvest barely lasted "
     "until spring. The grant paid for seeds, fertilizer, and a shared irrigation pump, and within one "
     "season the harvest doubled."),
    ("School",
     "The school charged fees that many parents could not pay, so children stayed home to work. There "
     "were no lunches, no books, and no pencils. Once fees were dropped and a free lunch was served, "
     "attendance rose from 60 to 240 students."),
    ("outro",
     "None of these steps were expensive. Together they showed that a village can escape poverty when "
     "people get basic help at the right time."),
]

MVP_TOPICS = [
    ("Hospital", ["hospital", "clinic", "doctor", "nurse", "patients", "medicine", "bed", "beds"]),
    ("Malaria", ["malaria", "mosquitoes", "mosquito", "nets", "net", "disease", "sick"]),
    ("Farming", ["farming", "farmers", "fertilizer", "seeds", "harvest", "maize", "irrigation", "crops"]),
    ("School", ["school", "fees", "lunch", "lunches", "students", "attendance", "books", "pencils"]),
]

MVP_CATEGORIES = [
    ("Clinic conditions", ["floor", "electricity", "water", "spoiled", "twice"]),
    ("Clinic staff", ["nurse", "doctor", "staff"]),
    ("Malaria facts", ["night", "children", "bites"]),
    ("Net cost", ["$5", "5", "dollars", "900"]),
    ("Soil and seeds", ["soil", "seeds", "fertilizer"]),
    ("Harvest results", ["doubled", "pump", "irrigation", "season"]),
    ("School costs", ["fees", "pay", "work"]),
    ("School supplies", ["lunch", "books", "pencils", "240", "60"]),
]

SPACE_PARAGRAPHS = [
    ("intro",
     "People often ask why a country should spend money on space when there are problems at home. "
     "The answer is that much of what we learn above the sky comes back down to us."),
    ("Technology",
     "Engineers who built spacecraft had to make machines smaller and lighter. Their work led to better "
     "cameras in phones, scratch resistant lenses, and memory foam for mattresses."),
    ("Medicine",
     "Doctors now use tools first designed for astronauts. Small wireless monitors track heart rate "
     "from far away, and imaging methods made for satellites help find tumors earlier."),
    ("Environment",
     "Satellites watch forests, ice, and oceans every day. Farmers use the data to plan irrigation, and "
     "weather forecasts warn towns about storms and floods days ahead."),
    ("Inspiration",
     "Space missions also inspire students. After a launch, more young people sign up for science and "
     "math classes, and some of them become the engineers of the next mission."),
    ("outro",
     "Money spent on space is not money thrown away. It is an investment that keeps paying back."),
]

SPACE_TOPICS = [
    ("Technology", ["engineers", "spacecraft", "cameras", "phones", "lenses", "foam", "mattresses"]),
    ("Medicine", ["doctors", "astronauts", "monitors", "heart", "imaging", "tumors", "medical"]),
    ("Environment", ["satellites", "forests", "ice", "oceans", "weather", "storms", "floods"]),
    ("Inspiration", ["inspire", "students", "science", "math", "launch", "classes"]),
]

SPACE_CATEGORIES = [
    ("Everyday devices", ["phones", "cameras", "mattresses"]),
    ("Materials", ["foam", "lenses", "scratch"]),
    ("Health tools", ["monitors", "wireless", "heart"]),
    ("Diagnosis", ["imaging", "tumors"]),
    ("Observed places", ["forests", "ice", "oceans"]),
    ("Warnings", ["storms", "floods", "forecasts"]),
    ("Schooling", ["science", "math", "classes"]),
    ("Careers", ["engineers", "mission"]),
]

# Near-synonyms share a direction with their keyword (cosine about 0.97);
# "related" words sit around 0.8, below the default threshold.
SYNONYMS = {
    "hospital": ["clinics", "infirmary"],
    "mosquitoes": ["mosquitos"],
    "fertilizer": ["fertiliser", "manure"],
    "fees": ["tuition"],
    "medicine": ["medication", "medicines", "drugs"],
    "harvest": ["harvests"],
    "satellites": ["satellite"],
    "astronauts": ["astronaut"],
}
RELATED = {
    "hospital": ["health"],
    "school": ["teacher", "class"],
    "farming": ["food"],
    "malaria": ["fever"],
}
FILLER = (
    "the a an and or but of to in on at for with from by is was were are be been it they he she we you "
    "i this that these those there their them his her our my village people money help poor poverty "
    "because so also more most very many some few life lives better good bad hard changed change "
    "author article think believe shows convincing argument evidence example reason first second third "
    "finally overall conclusion kids families family kenya africa year years day days time"
).split()


def paragraphs_to_article(paras):
    text = ""
    spans = []
    for i, (topic, body) in enumerate(paras):
        if i:
            text += "\n\n"
        start = len(text.encode("utf-8"))
        text += body
        end = len(text.encode("utf-8"))
        if topic not in ("intro", "outro"):
            spans.append({"topic": topic, "start": start, "end": end})
    return text, spans


def lexicon(article_id, paras, topics, categories):
    text, spans = paragraphs_to_article(paras)
    return {
        "schema_version": 1,
        "article_id": article_id,
        "window_size": 8,
        "stride": 1,
        "similarity_threshold": 0.9,
        "alpha": 2,
        "beta": 4,
        "gamma": 2,
        "topics": [{"name": n, "keywords": k} for n, k in topics],
        "categories": [{"name": n, "keywords": k} for n, k in categories],
        "article_text": text,
        "topic_highlight_spans": spans,
    }


def unit(v):
    return v / np.linalg.norm(v)


def toward(base, target_cos, rng):
    """A unit vector at exactly `target_cos` to unit vector `base`."""
    noise = rng.standard_normal(base.shape)
    noise -= noise.dot(base) * base
    noise = unit(noise)
    return target_cos * base + np.sqrt(1 - target_cos**2) * noise


def embeddings(dim=50, seed=7):
    rng = np.random.default_rng(seed)
    words = []
    for _, kws in MVP_TOPICS + MVP_CATEGORIES + SPACE_TOPICS + SPACE_CATEGORIES:
        for kw in kws:
            for w in kw.lower().split():
                w = w.strip("$")
                if w and w not in words and not w.isdigit():
                    words.append(w)
    words += [w for w in FILLER if w not in words]
    vectors = {w: unit(rng.standard_normal(dim)) for w in words}
    for base, syns in SYNONYMS.items():
        for s in syns:
            vectors[s] = toward(vectors[base], 0.97, rng)
    for base, rel in RELATED.items():
        for r in rel:
            vectors[r] = toward(vectors[base], 0.8, rng)
    lines = [w + " " + " ".join(f"{x:.6f}" for x in v) for w, v in sorted(vectors.items())]
    return "\n".join(lines) + "\n"


def main():
    for name, paras, topics, cats in [
        ("mvp", MVP_PARAGRAPHS, MVP_TOPICS, MVP_CATEGORIES),
        ("space", SPACE_PARAGRAPHS, SPACE_TOPICS, SPACE_CATEGORIES),
    ]:
        path = HERE / "lexicons" / f"{name}.json"
        path.write_text(json.dumps(lexicon(name, paras, topics, cats), indent=2, ensure_ascii=False) + "\n")
    (HERE / "embeddings" / "toy50.txt").write_text(embeddings())


if __name__ == "__main__":
    main()
