#!/usr/bin/env python3
"""Writes tokenizer goldens produced by the Hugging Face `tokenizers` library.

Outputs (under tests/data/):
  bpe_tokenizer.json     small byte-level BPE trained on a fixed corpus
  tokenizer_cases.json   expected tokens / ids for both tokenizers
"""

import json
import os

from tokenizers import Tokenizer, decoders, models, pre_tokenizers, processors, trainers

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.normpath(os.path.join(HERE, "..", ".."))
OUT = os.path.join(ROOT, "tests", "data")

CORPUS = [
    "The city council approved a new budget on Monday.",
    "Heavy rain flooded the river valley overnight.",
    "The football club signed a young striker from Brazil.",
    "Scientists found a new species of frog in the forest.",
    "Trains are running again after three weeks of bridge repairs.",
    "The museum opened a show of modern art.",
] * 4

PROBES = [
    "the cat sat on the mat",
    "The council approved a budget with more money for parks and schools.",
    "Dr. Smith left. He returned!",
    "state-of-the-art, well-known (and) quoted \"text\"",
    "  extra   spaces\tand\nnewlines  ",
    "Numbers 3.5 and 1,000 percent",
    "CAPITALS and MiXeD case",
    "unknownwordthatisveryveryverylongandkeepsgoingpastthelimitofonehundredcharacterswhichisthedefaultmaxinputcharsperword",
    "",
]


def bpe_tokenizer():
    tok = Tokenizer(models.BPE())
    tok.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    tok.decoder = decoders.ByteLevel()
    trainer = trainers.BpeTrainer(
        vocab_size=300,
        special_tokens=["<s>", "<pad>", "</s>", "<unk>"],
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
        show_progress=False,
    )
    tok.train_from_iterator(CORPUS, trainer=trainer)
    tok.post_processor = processors.RobertaProcessing(("</s>", tok.token_to_id("</s>")), ("<s>", tok.token_to_id("<s>")))
    return tok


def cases(tok):
    out = []
    for text in PROBES:
        plain = tok.encode(text, add_special_tokens=False)
        full = tok.encode(text)
        pair = tok.encode(text, "the cat", add_special_tokens=True)
        out.append(
            {
                "text": text,
                "tokens": plain.tokens,
                "ids": plain.ids,
                "special_ids": full.ids,
                "pair_ids": pair.ids,
                "pair_type_ids": pair.type_ids,
            }
        )
    return out


def main():
    os.makedirs(OUT, exist_ok=True)
    bpe = bpe_tokenizer()
    bpe.save(os.path.join(OUT, "bpe_tokenizer.json"))
    wordpiece = Tokenizer.from_file(os.path.join(ROOT, "fixtures", "tokenizer.json"))
    data = {"wordpiece": cases(wordpiece), "bpe": cases(bpe)}
    with open(os.path.join(OUT, "tokenizer_cases.json"), "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
