"""Regenerate the derived files of the bundled toy corpus from gold.amr.

    python scripts/build_toy_corpus.py
"""

import os

from amrtext import _io
from amrtext.dataset import ExampleRecord, ingest_gold_amr, sentence_id, write_records

HERE = os.path.join(os.path.dirname(__file__), "..", "src", "amrtext", "data", "toy")

REFERENCES = {
    "es": {
        "wb.eng_0001.1": "El niño quiere ir.",
        "wb.eng_0002.2": "Ojalá pudiera borrarla de mi vida, las cosas hubieran sido mucho mejor sin ella.",
        "nw.wsj_0003.1": "La empresa no informó de beneficios.",
        "nw.wsj_0004.1": "Las acciones de las empresas de Nueva York subieron un 5 por ciento.",
        "bolt12_0005.1": "Ella lee libros todas las noches.",
        "bolt12_0006.2": "¡No abras la puerta!",
        "DF-200-0007.1": "El profesor que me ayudó dejó la escuela.",
        "DF-200-0008.1": "Necesitamos más tiempo y dinero.",
        "PROXY_AFP_ENG_0009.3": "El ministro dijo que las conversaciones continuarían.",
        "PROXY_AFP_ENG_0010.1": "A los niños les gusta jugar fuera.",
    },
    "de": {
        "wb.eng_0001.1": "Der Junge will gehen.",
        "wb.eng_0002.2": "Ich wünschte, ich könnte sie aus meinem Leben streichen - ohne sie wäre alles so viel besser.",
        "nw.wsj_0003.1": "Das Unternehmen meldete keine Gewinne.",
        "nw.wsj_0004.1": "Die Aktien New Yorker Unternehmen stiegen um 5 Prozent.",
        "bolt12_0005.1": "Sie liest jeden Abend Bücher.",
        "bolt12_0006.2": "Öffne die Tür nicht!",
        "DF-200-0007.1": "Der Lehrer, der mir geholfen hat, hat die Schule verlassen.",
        "DF-200-0008.1": "Wir brauchen mehr Zeit und Geld.",
        "PROXY_AFP_ENG_0009.3": "Der Minister sagte, die Gespräche würden fortgesetzt.",
        "PROXY_AFP_ENG_0010.1": "Kinder spielen gern draußen.",
    },
}

# (english, foreign, language, corpus, silver parse)
PARALLEL = [
    ("The cat sleeps.", "El gato duerme.", "es", "tatoeba", "(s / sleep-01 :ARG0 (c / cat))"),
    ("We eat bread.", "Comemos pan.", "es", "tatoeba", "(e / eat-01 :ARG0 (w / we) :ARG1 (b / bread))"),
    ("The debate is closed.", "Se cierra el debate.", "es", "europarl", "(c / close-01 :ARG1 (d / debate-01))"),
    ("Ideas change the world.", "Las ideas cambian el mundo.", "es", "ted2020",
     "(c / change-01 :ARG0 (i / idea) :ARG1 (w / world))"),
    ("The cat sleeps.", "Die Katze schläft.", "de", "tatoeba", "(s / sleep-01 :ARG0 (c / cat))"),
    ("We eat bread.", "Wir essen Brot.", "de", "tatoeba", "(e / eat-01 :ARG0 (w / we) :ARG1 (b / bread))"),
    ("The debate is closed.", "Die Aussprache ist geschlossen.", "de", "europarl",
     "(c / close-01 :ARG1 (d / debate-01))"),
    ("Ideas change the world.", "Ideen verändern die Welt.", "de", "ted2020",
     "(c / change-01 :ARG0 (i / idea) :ARG1 (w / world))"),
]


def main():
    gold = list(ingest_gold_amr(os.path.join(HERE, "gold.amr")))
    test = []
    for lang, refs in REFERENCES.items():
        _io.write_jsonl(os.path.join(HERE, f"translations.{lang}.jsonl"),
                        ({"id": g.id, "text": refs[g.id]} for g in gold))
        for g in gold:
            test.append(ExampleRecord.create(f"{g.id}.{lang}", lang, g.graph, refs[g.id], "gold_amr",
                                             genre=g.genre, english_sentence=g.target_sentence, amr_text=g.amr))
    write_records(os.path.join(HERE, "test.jsonl"), test)
    _io.write_jsonl(os.path.join(HERE, "hyp.identity.jsonl"), ({"id": r.id, "text": r.target_sentence} for r in test))
    for lang in REFERENCES:
        _io.write_jsonl(os.path.join(HERE, f"parallel.{lang}.jsonl"),
                        ({"english": e, "foreign": f, "language": l, "corpus": c}
                         for e, f, l, c, _ in PARALLEL if l == lang))
    parses = {sentence_id(e): p for e, _, _, _, p in PARALLEL}
    _io.write_jsonl(os.path.join(HERE, "parses.jsonl"), ({"id": k, "text": v} for k, v in parses.items()))


if __name__ == "__main__":
    main()
