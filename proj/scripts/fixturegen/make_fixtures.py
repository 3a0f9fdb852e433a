#!/usr/bin/env python3
"""Regenerates the committed mini models, fixture files and goldens.

Outputs (under fixtures/):
  tokenizer.json            WordPiece tokenizer shared by both mini models
  mini_encoder.onnx         2-layer, dim-32 encoder exposing hidden_states_0..2
  mini_nli.onnx             same architecture + classification head (logits)
  manifest.json             export manifest (digests, layer count, label order)
  mini_encoder.json         model config for the encoder
  mini_nli.json             model config for the NLI classifier
  pair_tokens.json          embedding fixture, 10 pairs -> 20 items
  pair_sentences.json       embedding fixture for every sentence of the pairs
  pair_nli.json             NLI fixture for doc x (doc + summary) sentence pairs
  pair_goldens.json         reference BERTScore P/R/F (idf off/on), MoverScore,
                            sentence-level goldens
  cat_golden.json           golden matrix for "the cat sat on the mat"
  bench.jsonl               harness dataset
  bench_tokens.json         embedding fixture for every bench text and sentence
  bench_external.csv        external score column
  bench_golden.json         oracle correlation rows for the bench suite

Requires torch, transformers, tokenizers, onnx, onnxruntime, bert_score, scipy.
"""

import hashlib
import json
import math
import os
import random
import re
import sys
import tempfile

import numpy as np
import onnx
import onnxruntime as ort
import torch
from onnx import TensorProto, helper, numpy_helper
from scipy import stats
from tokenizers import Tokenizer, decoders, models, normalizers, pre_tokenizers, processors

sys.path.insert(0, os.path.dirname(__file__))
import corpus  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.normpath(os.path.join(HERE, "..", "..", "fixtures"))
SEED = 20231016
HIDDEN, LAYERS, HEADS, FFN, MAX_POS = 32, 2, 4, 64, 128
NLI_LABELS = ["contradict", "neutral", "entail"]

ABBREVIATIONS = {"dr.", "mr.", "mrs.", "ms.", "st.", "no.", "u.s.", "e.g.", "i.e.", "etc."}


def split_sentences(text):
    text = text.strip()
    out, start, i = [], 0, 0
    while i < len(text):
        c = text[i]
        if c in ".!?":
            j = i + 1
            while j < len(text) and text[j] in ".!?\"')":
                j += 1
            if j < len(text) and text[j].isspace():
                k = j
                while k < len(text) and text[k].isspace():
                    k += 1
                if k < len(text) and (text[k].isupper() or text[k].isdigit() or text[k] in "\"'"):
                    word = text[start:j].split()[-1].lower()
                    if word not in ABBREVIATIONS:
                        out.append(text[start:j])
                        start = k
                        i = k
                        continue
            i = j
            continue
        i += 1
    if text[start:].strip():
        out.append(text[start:].strip())
    return out


def word_tokenize(text):
    return re.findall(r"[a-z0-9\x80-\U0010ffff]+", text.lower())


def dump_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, ensure_ascii=False, separators=(",", ":"))
        f.write("\n")


def sha256(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


# ---------------------------------------------------------------------------
# Tokenizer


def all_texts():
    texts = [corpus.CAT_TEXT] + corpus.NLI_EXTRA
    for d, s in corpus.PAIRS:
        texts += [d, s]
    for sums in corpus.BENCH_SUMMARIES.values():
        texts += sums
    return texts


def build_tokenizer():
    """WordPiece vocabulary built deterministically: specials, characters,
    continuation characters, then corpus words seen at least twice (rarer
    words fall back to character pieces)."""
    counts = {}
    for text in all_texts() + ["not not"]:
        for w in re.findall(r"[a-z0-9]+|[^\sa-z0-9]", text.lower()):
            counts[w] = counts.get(w, 0) + 1
    chars = sorted({c for w in counts for c in w})
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += chars + ["##" + c for c in chars if c.isalnum()]
    words = sorted((w for w, n in counts.items() if n >= 2 and len(w) > 1), key=lambda w: (-counts[w], w))
    vocab += [w for w in words if w not in vocab]
    tok = Tokenizer(
        models.WordPiece({t: i for i, t in enumerate(vocab)}, unk_token="[UNK]", max_input_chars_per_word=100)
    )
    tok.normalizer = normalizers.BertNormalizer(lowercase=True, strip_accents=None, clean_text=True)
    tok.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    tok.decoder = decoders.WordPiece()
    cls, sep = tok.token_to_id("[CLS]"), tok.token_to_id("[SEP]")
    tok.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", cls), ("[SEP]", sep)],
    )
    return tok


# ---------------------------------------------------------------------------
# Models


def make_bert(vocab_size, num_labels=None):
    from transformers import BertConfig, BertForSequenceClassification, BertModel

    cfg = BertConfig(
        vocab_size=vocab_size,
        hidden_size=HIDDEN,
        num_hidden_layers=LAYERS,
        num_attention_heads=HEADS,
        intermediate_size=FFN,
        max_position_embeddings=MAX_POS,
        hidden_dropout_prob=0.0,
        attention_probs_dropout_prob=0.0,
        attn_implementation="eager",
    )
    if num_labels is None:
        return BertModel(cfg)
    cfg.num_labels = num_labels
    return BertForSequenceClassification(cfg)


def nli_training_pairs(rng):
    sents = []
    for d, s in corpus.PAIRS:
        sents += split_sentences(d) + split_sentences(s)
    sents += corpus.NLI_EXTRA
    sents = sorted(set(sents))
    pairs = []
    for s in sents:
        words = s.rstrip(".").split()
        pairs.append((s, s, 2))
        if len(words) > 3:
            drop = rng.randrange(1, len(words))
            pairs.append((s, " ".join(words[:drop] + words[drop + 1 :]) + ".", 2))
        neg = " ".join(words[:1] + ["did", "not"] + words[1:]) + "."
        pairs.append((s, neg, 0))
        neg2 = " ".join(words[:2] + ["not"] + words[2:]) + "."
        pairs.append((s, neg2, 0))
        other = rng.choice([t for t in sents if t != s])
        pairs.append((s, other, 1))
    return pairs


def train_nli(model, tok, rng):
    pairs = nli_training_pairs(rng)
    opt = torch.optim.Adam(model.parameters(), lr=3e-3)
    model.train()
    for step in range(400):
        batch = [pairs[rng.randrange(len(pairs))] for _ in range(16)]
        encs = tok.encode_batch([(p, h) for p, h, _ in batch])
        width = max(len(e.ids) for e in encs)
        ids = torch.tensor([e.ids + [0] * (width - len(e.ids)) for e in encs])
        types = torch.tensor([e.type_ids + [0] * (width - len(e.ids)) for e in encs])
        mask = torch.tensor([[1] * len(e.ids) + [0] * (width - len(e.ids)) for e in encs])
        labels = torch.tensor([y for _, _, y in batch])
        out = model(input_ids=ids, token_type_ids=types, attention_mask=mask, labels=labels)
        opt.zero_grad()
        out.loss.backward()
        opt.step()
    model.eval()
    correct = 0
    with torch.no_grad():
        for p, h, y in pairs:
            e = tok.encode(p, h)
            logits = model(
                input_ids=torch.tensor([e.ids]), token_type_ids=torch.tensor([e.type_ids])
            ).logits
            correct += int(logits.argmax().item() == y)
    print(f"mini NLI training accuracy: {correct}/{len(pairs)}")


def t2n(t):
    return t.detach().cpu().numpy().astype(np.float32)


def export_graph(bert, path, model_id, classifier=None):
    """Hand-built ONNX graph that mirrors BertModel (post-LN, erf GELU)."""
    inits, nodes = [], []

    def const(name, arr):
        inits.append(numpy_helper.from_array(np.asarray(arr), name))
        return name

    def node(op, ins, outs, **attrs):
        nodes.append(helper.make_node(op, ins, outs, **attrs))
        return outs[0]

    emb = bert.embeddings
    const("word_emb", t2n(emb.word_embeddings.weight))
    const("pos_emb", t2n(emb.position_embeddings.weight))
    const("type_emb", t2n(emb.token_type_embeddings.weight))
    const("emb_ln_g", t2n(emb.LayerNorm.weight))
    const("emb_ln_b", t2n(emb.LayerNorm.bias))
    const("i64_0", np.array([0], dtype=np.int64))
    const("i64_1", np.array([1], dtype=np.int64))
    const("i64_2", np.array([2], dtype=np.int64))
    const("mask_axes", np.array([1, 2], dtype=np.int64))
    const("one_f", np.array(1.0, dtype=np.float32))
    const("neg_big", np.array(-10000.0, dtype=np.float32))
    const("half", np.array(0.5, dtype=np.float32))
    const("sqrt2", np.array(math.sqrt(2.0), dtype=np.float32))
    dh = HIDDEN // HEADS
    const("scale", np.array(1.0 / math.sqrt(dh), dtype=np.float32))
    const("heads_shape", np.array([0, 0, HEADS, dh], dtype=np.int64))
    const("merge_shape", np.array([0, 0, HIDDEN], dtype=np.int64))

    node("Gather", ["word_emb", "input_ids"], ["we"])
    node("Shape", ["input_ids"], ["ids_shape"])
    node("Slice", ["ids_shape", "i64_1", "i64_2"], ["seq_len"])
    node("Slice", ["pos_emb", "i64_0", "seq_len", "i64_0"], ["pe"])
    node("Gather", ["type_emb", "token_type_ids"], ["te"])
    node("Add", ["we", "pe"], ["e1"])
    node("Add", ["e1", "te"], ["e2"])
    x = node("LayerNormalization", ["e2", "emb_ln_g", "emb_ln_b"], ["e3"], axis=-1, epsilon=1e-12)
    outputs = [node("Identity", [x], ["hidden_states_0"])]

    node("Cast", ["attention_mask"], ["mask_f"], to=TensorProto.FLOAT)
    node("Sub", ["one_f", "mask_f"], ["mask_inv"])
    node("Mul", ["mask_inv", "neg_big"], ["mask_bias"])
    node("Unsqueeze", ["mask_bias", "mask_axes"], ["mask4"])

    for li, layer in enumerate(bert.encoder.layer):
        p = f"l{li}_"
        att = layer.attention
        for nm, lin in (("q", att.self.query), ("k", att.self.key), ("v", att.self.value)):
            const(p + nm + "_w", t2n(lin.weight).T.copy())
            const(p + nm + "_b", t2n(lin.bias))
            node("MatMul", [x, p + nm + "_w"], [p + nm + "_mm"])
            node("Add", [p + nm + "_mm", p + nm + "_b"], [p + nm])
            node("Reshape", [p + nm, "heads_shape"], [p + nm + "_r"])
        node("Transpose", [p + "q_r"], [p + "qh"], perm=[0, 2, 1, 3])
        node("Transpose", [p + "k_r"], [p + "kh"], perm=[0, 2, 3, 1])
        node("Transpose", [p + "v_r"], [p + "vh"], perm=[0, 2, 1, 3])
        node("MatMul", [p + "qh", p + "kh"], [p + "sc0"])
        node("Mul", [p + "sc0", "scale"], [p + "sc1"])
        node("Add", [p + "sc1", "mask4"], [p + "sc2"])
        node("Softmax", [p + "sc2"], [p + "probs"], axis=-1)
        node("MatMul", [p + "probs", p + "vh"], [p + "ctx0"])
        node("Transpose", [p + "ctx0"], [p + "ctx1"], perm=[0, 2, 1, 3])
        node("Reshape", [p + "ctx1", "merge_shape"], [p + "ctx"])
        const(p + "o_w", t2n(att.output.dense.weight).T.copy())
        const(p + "o_b", t2n(att.output.dense.bias))
        const(p + "ln1_g", t2n(att.output.LayerNorm.weight))
        const(p + "ln1_b", t2n(att.output.LayerNorm.bias))
        node("MatMul", [p + "ctx", p + "o_w"], [p + "ao0"])
        node("Add", [p + "ao0", p + "o_b"], [p + "ao"])
        node("Add", [p + "ao", x], [p + "res1"])
        x1 = node(
            "LayerNormalization", [p + "res1", p + "ln1_g", p + "ln1_b"], [p + "x1"], axis=-1, epsilon=1e-12
        )
        const(p + "i_w", t2n(layer.intermediate.dense.weight).T.copy())
        const(p + "i_b", t2n(layer.intermediate.dense.bias))
        const(p + "f_w", t2n(layer.output.dense.weight).T.copy())
        const(p + "f_b", t2n(layer.output.dense.bias))
        const(p + "ln2_g", t2n(layer.output.LayerNorm.weight))
        const(p + "ln2_b", t2n(layer.output.LayerNorm.bias))
        node("MatMul", [x1, p + "i_w"], [p + "h0"])
        node("Add", [p + "h0", p + "i_b"], [p + "h"])
        node("Div", [p + "h", "sqrt2"], [p + "g0"])
        node("Erf", [p + "g0"], [p + "g1"])
        node("Add", [p + "g1", "one_f"], [p + "g2"])
        node("Mul", [p + "h", "half"], [p + "g3"])
        node("Mul", [p + "g3", p + "g2"], [p + "gelu"])
        node("MatMul", [p + "gelu", p + "f_w"], [p + "f0"])
        node("Add", [p + "f0", p + "f_b"], [p + "f"])
        node("Add", [p + "f", x1], [p + "res2"])
        x = node(
            "LayerNormalization", [p + "res2", p + "ln2_g", p + "ln2_b"], [p + "x2"], axis=-1, epsilon=1e-12
        )
        outputs.append(node("Identity", [x], [f"hidden_states_{li + 1}"]))

    graph_outputs = [
        helper.make_tensor_value_info(o, TensorProto.FLOAT, [1, "seq", HIDDEN]) for o in outputs
    ]
    if classifier is not None:
        pooler, head = classifier
        const("cls_index", np.array(0, dtype=np.int64))
        const("pool_w", t2n(pooler.dense.weight).T.copy())
        const("pool_b", t2n(pooler.dense.bias))
        const("head_w", t2n(head.weight).T.copy())
        const("head_b", t2n(head.bias))
        node("Gather", [x, "cls_index"], ["cls"], axis=1)
        node("MatMul", ["cls", "pool_w"], ["pool0"])
        node("Add", ["pool0", "pool_b"], ["pool1"])
        node("Tanh", ["pool1"], ["pooled"])
        node("MatMul", ["pooled", "head_w"], ["logits0"])
        node("Add", ["logits0", "head_b"], ["logits"])
        graph_outputs = [helper.make_tensor_value_info("logits", TensorProto.FLOAT, [1, 3])]

    inputs = [
        helper.make_tensor_value_info(n, TensorProto.INT64, [1, "seq"])
        for n in ("input_ids", "attention_mask", "token_type_ids")
    ]
    graph = helper.make_graph(nodes, model_id, inputs, graph_outputs, initializer=inits)
    model = helper.make_model(graph, opset_imports=[helper.make_opsetid("", 17)], producer_name="fixturegen")
    model.ir_version = 8
    helper.set_model_props(model, {"model_id": model_id})
    onnx.checker.check_model(model)
    onnx.save(model, path)


def hidden_states(bert, tok, text):
    enc = tok.encode(text)
    with torch.no_grad():
        out = bert(
            input_ids=torch.tensor([enc.ids]),
            token_type_ids=torch.tensor([enc.type_ids]),
            attention_mask=torch.ones(1, len(enc.ids), dtype=torch.long),
            output_hidden_states=True,
        )
    return enc, [h[0].double().numpy() for h in out.hidden_states]


def parity(bert, tok, path, probes):
    sess = ort.InferenceSession(path, providers=["CPUExecutionProvider"])
    worst = 0.0
    for text in probes:
        enc, hs = hidden_states(bert, tok, text)
        feeds = {
            "input_ids": np.array([enc.ids], dtype=np.int64),
            "attention_mask": np.ones((1, len(enc.ids)), dtype=np.int64),
            "token_type_ids": np.array([enc.type_ids], dtype=np.int64),
        }
        outs = sess.run(None, feeds)
        for a, b in zip(outs, hs):
            worst = max(worst, float(np.abs(a[0] - b).max()))
    if worst > 1e-3:
        raise SystemExit(f"export parity failure: max deviation {worst}")
    return worst


# ---------------------------------------------------------------------------
# Fixture items


def normalize_rows(m):
    return m / np.linalg.norm(m, axis=1, keepdims=True)


def token_item(bert, tok, item_id, text, layer=LAYERS):
    enc, hs = hidden_states(bert, tok, text)
    vecs = normalize_rows(hs[layer][1:-1])
    return {
        "id": item_id,
        "text": text,
        "tokens": enc.tokens[1:-1],
        "vectors": [[float(v) for v in row] for row in vecs],
        "idf": None,
    }


def fixture_file(items):
    return {"model_id": "mini-encoder", "layer": LAYERS, "dim": HIDDEN, "items": items}


def sentence_vec(item):
    v = np.asarray(item["vectors"]).mean(axis=0)
    return v / np.linalg.norm(v)


def greedy(c, r, wc=None, wr=None):
    """Independent numpy max-pooling; mirrors bert_score's greedy_cos_idf."""
    sim = np.asarray(c) @ np.asarray(r).T
    wc = np.ones(len(c)) if wc is None else np.asarray(wc)
    wr = np.ones(len(r)) if wr is None else np.asarray(wr)
    p = float((sim.max(axis=1) * wc).sum() / wc.sum())
    rec = float((sim.max(axis=0) * wr).sum() / wr.sum())
    f = 2 * p * rec / (p + rec) if p + rec > 0 else 0.0
    return p, rec, f


def sentence_score(doc_sents, sum_sents, vec_of, weighting):
    X = np.array([vec_of(s) for s in doc_sents])
    Y = np.array([vec_of(s) for s in sum_sents])
    S = X @ Y.T
    if weighting == "none":
        p = float(S.max(axis=0).mean())
        r = float(S.max(axis=1).mean())
    else:
        self_sim = X @ X.T
        k = len(doc_sents)
        if k == 1:
            w = np.ones(1)
        elif weighting == "sum":
            w = np.array([sum(self_sim[i, j] for j in range(k) if j != i) for i in range(k)])
        else:
            w = []
            for i in range(k):
                row = np.array([self_sim[i, j] + 1.0 for j in range(k) if j != i])
                tot = row.sum()
                q = row / tot if tot > 0 else np.full(len(row), 1.0 / len(row))
                w.append(float(-sum(x * math.log(x) for x in q if x > 0)))
            w = np.array(w)
        v = w @ S
        wn = w / w.sum() if abs(w.sum()) > 1e-12 else np.full(k, 1.0 / k)
        vn = v / v.sum() if abs(v.sum()) > 1e-12 else np.full(len(v), 1.0 / len(v))
        p = float((vn * S.max(axis=0)).sum())
        r = float((wn * S.max(axis=1)).sum())
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def rouge_n_oracle(c, r, n):
    def grams(t):
        out = {}
        for i in range(len(t) - n + 1):
            g = tuple(t[i : i + n])
            out[g] = out.get(g, 0) + 1
        return out

    gc, gr = grams(c), grams(r)
    tc, tr = sum(gc.values()), sum(gr.values())
    if tc == 0 or tr == 0:
        return 0.0, 0.0, 0.0
    ov = sum(min(v, gr.get(g, 0)) for g, v in gc.items())
    p, rec = ov / tc, ov / tr
    return p, rec, (2 * p * rec / (p + rec) if p + rec > 0 else 0.0)


def rouge_l_oracle(c, r):
    dp = [[0] * (len(r) + 1) for _ in range(len(c) + 1)]
    for i in range(1, len(c) + 1):
        for j in range(1, len(r) + 1):
            dp[i][j] = dp[i - 1][j - 1] + 1 if c[i - 1] == r[j - 1] else max(dp[i - 1][j], dp[i][j - 1])
    lcs = dp[-1][-1]
    p = lcs / len(c) if c else 0.0
    rec = lcs / len(r) if r else 0.0
    return p, rec, (2 * p * rec / (p + rec) if p + rec > 0 else 0.0)


def nli_probs(model, tok, premise, hypothesis):
    e = tok.encode(premise, hypothesis)
    with torch.no_grad():
        logits = model(input_ids=torch.tensor([e.ids]), token_type_ids=torch.tensor([e.type_ids])).logits[0]
    probs = torch.softmax(logits.double(), dim=-1).numpy()
    canon = {lab: float(probs[i]) for i, lab in enumerate(NLI_LABELS)}
    return [canon["entail"], canon["neutral"], canon["contradict"]]


# ---------------------------------------------------------------------------


def save_hf_model(bert, tok, tmpdir):
    from transformers import BertTokenizerFast

    model_dir = os.path.join(tmpdir, "mini-encoder")
    if not os.path.isdir(model_dir):
        bert.save_pretrained(model_dir)
        fast = BertTokenizerFast(tokenizer_object=tok, model_max_length=MAX_POS)
        fast.save_pretrained(model_dir)
    return model_dir


def stock_bertscore(model_dir, cands, refs, idf):
    """The published bert_score entry point, unmodified."""
    from bert_score import score

    P, R, F = score(
        cands, refs, model_type=model_dir, num_layers=LAYERS, idf=idf, batch_size=4, nthreads=0, device="cpu"
    )
    return [(float(p), float(r), float(f)) for p, r, f in zip(P, R, F)]


def reference_bertscore(model_dir, cands, refs, idf):
    """bert_score's embedding and greedy kernels on special-token-free rows.

    The stock entry point keeps [CLS]/[SEP] rows inside the max-pooling and
    masks batch padding to 0; the engine excludes special tokens, so the
    goldens are computed one pair at a time on the content rows only.
    """
    from collections import defaultdict

    from bert_score.utils import get_bert_embedding, get_idf_dict, get_model, get_tokenizer, greedy_cos_idf

    tokenizer = get_tokenizer(model_dir, use_fast=True)
    model = get_model(model_dir, LAYERS, all_layers=False)
    model.eval()
    if idf:
        idf_dict = get_idf_dict(refs, tokenizer, nthreads=0)
    else:
        idf_dict = defaultdict(lambda: 1.0)
    idf_dict[tokenizer.sep_token_id] = 0
    idf_dict[tokenizer.cls_token_id] = 0

    def embed(text):
        emb, _, padded_idf = get_bert_embedding([text], model, tokenizer, idf_dict, device="cpu")
        return emb[:, 1:-1].double(), padded_idf[:, 1:-1].double()

    out = []
    for c, r in zip(cands, refs):
        ce, ci = embed(c)
        re_, ri = embed(r)
        P, R, F = greedy_cos_idf(
            re_, torch.ones(1, re_.shape[1]), ri, ce, torch.ones(1, ce.shape[1]), ci
        )
        out.append((float(P[0]), float(R[0]), float(F[0])))
    return out


def spearman_or_none(x, y):
    if len(set(x)) < 2 or len(set(y)) < 2:
        return None
    return float(stats.spearmanr(x, y).statistic)


def pearson_or_none(x, y):
    if len(set(x)) < 2 or len(set(y)) < 2:
        return None
    return float(stats.pearsonr(x, y).statistic)


def write_model_configs():
    common = {"tokenizer_path": "tokenizer.json", "layer": LAYERS, "max_length": MAX_POS}
    enc = {"model_id": "mini-encoder", "encoder_path": "mini_encoder.onnx", **common}
    nli = {"model_id": "mini-nli", "encoder_path": "mini_nli.onnx", **common, "nli_label_order": NLI_LABELS}
    for name, cfg in (("mini_encoder.json", enc), ("mini_nli.json", nli)):
        with open(os.path.join(OUT, name), "w", encoding="utf-8") as f:
            json.dump(cfg, f, indent=2)
            f.write("\n")


def main():
    random.seed(SEED)
    np.random.seed(SEED)
    torch.manual_seed(SEED)
    rng = random.Random(SEED)
    os.makedirs(OUT, exist_ok=True)

    tok = build_tokenizer()
    tok.save(os.path.join(OUT, "tokenizer.json"))
    vocab_size = tok.get_vocab_size()

    encoder = make_bert(vocab_size)
    encoder.eval()
    nli = make_bert(vocab_size, num_labels=3)
    train_nli(nli, tok, rng)

    enc_path = os.path.join(OUT, "mini_encoder.onnx")
    nli_path = os.path.join(OUT, "mini_nli.onnx")
    export_graph(encoder, enc_path, "mini-encoder")
    export_graph(nli.bert, nli_path, "mini-nli", classifier=(nli.bert.pooler, nli.classifier))
    probes = [corpus.CAT_TEXT, corpus.PAIRS[0][0], corpus.PAIRS[2][1], "A student won the science prize.", "x"]
    dev = parity(encoder, tok, enc_path, probes)
    print(f"encoder export parity: max deviation {dev:.3g}")

    sess = ort.InferenceSession(nli_path, providers=["CPUExecutionProvider"])
    for p, h in [(corpus.PAIRS[1][0], corpus.PAIRS[1][1]), ("The dog ran.", "The dog did not run.")]:
        e = tok.encode(p, h)
        logits = sess.run(
            None,
            {
                "input_ids": np.array([e.ids], dtype=np.int64),
                "attention_mask": np.ones((1, len(e.ids)), dtype=np.int64),
                "token_type_ids": np.array([e.type_ids], dtype=np.int64),
            },
        )[0][0]
        with torch.no_grad():
            ref = nli(input_ids=torch.tensor([e.ids]), token_type_ids=torch.tensor([e.type_ids])).logits[0].numpy()
        if np.abs(logits - ref).max() > 1e-3:
            raise SystemExit("nli export parity failure")

    manifest = {
        "models": [
            {
                "model_id": "mini-encoder",
                "source": "BertModel(random init, seed %d)" % SEED,
                "opset": 17,
                "file": "mini_encoder.onnx",
                "sha256": sha256(enc_path),
                "layers": LAYERS,
                "hidden": HIDDEN,
                "max_length": MAX_POS,
            },
            {
                "model_id": "mini-nli",
                "source": "BertForSequenceClassification(trained on synthetic pairs, seed %d)" % SEED,
                "opset": 17,
                "file": "mini_nli.onnx",
                "sha256": sha256(nli_path),
                "layers": LAYERS,
                "hidden": HIDDEN,
                "max_length": MAX_POS,
                "nli_label_order": NLI_LABELS,
            },
        ]
    }
    dump_json(os.path.join(OUT, "manifest.json"), manifest)
    write_model_configs()

    # Pair fixtures.
    items = []
    for i, (doc, summ) in enumerate(corpus.PAIRS):
        items.append(token_item(encoder, tok, f"pair{i}.doc", doc))
        items.append(token_item(encoder, tok, f"pair{i}.sum", summ))
    dump_json(os.path.join(OUT, "pair_tokens.json"), fixture_file(items))
    by_text = {it["text"]: it for it in items}

    sentences = []
    for doc, summ in corpus.PAIRS:
        for s in split_sentences(doc) + split_sentences(summ):
            if s not in sentences:
                sentences.append(s)
    sent_items = [token_item(encoder, tok, f"sent{i}", s) for i, s in enumerate(sentences)]
    dump_json(os.path.join(OUT, "pair_sentences.json"), fixture_file(sent_items))
    sent_by_text = {it["text"]: it for it in sent_items}
    sent_by_text.update(by_text)

    nli_rows = []
    seen = set()
    for doc, summ in corpus.PAIRS:
        ds = split_sentences(doc)
        for p in ds:
            for h in ds + split_sentences(summ):
                if (p, h) in seen:
                    continue
                seen.add((p, h))
                nli_rows.append({"premise": p, "hypothesis": h, "probs": nli_probs(nli, tok, p, h)})
    dump_json(os.path.join(OUT, "pair_nli.json"), {"model_id": "mini-nli", "pairs": nli_rows})
    nli_lookup = {(r["premise"], r["hypothesis"]): r["probs"] for r in nli_rows}

    with tempfile.TemporaryDirectory() as tmp:
        docs = [d for d, _ in corpus.PAIRS]
        sums = [s for _, s in corpus.PAIRS]
        model_dir = save_hf_model(encoder, tok, tmp)
        ref_plain = reference_bertscore(model_dir, sums, docs, idf=False)
        ref_idf = reference_bertscore(model_dir, sums, docs, idf=True)
        stock_plain = stock_bertscore(model_dir, sums, docs, idf=False)

    # Cross-check the reference package against the fixture vectors.
    goldens = []
    for i, (doc, summ) in enumerate(corpus.PAIRS):
        c, r = by_text[summ]["vectors"], by_text[doc]["vectors"]
        mine = greedy(c, r)
        if max(abs(a - b) for a, b in zip(mine, ref_plain[i])) > 1e-4:
            raise SystemExit(f"pair {i}: fixture vectors disagree with bert_score: {mine} vs {ref_plain[i]}")
        ds, ss = split_sentences(doc), split_sentences(summ)
        entry = {
            "id": i,
            "document": doc,
            "summary": summ,
            "bertscore": list(ref_plain[i]),
            "bertscore_idf": list(ref_idf[i]),
            "bertscore_stock": list(stock_plain[i]),
            "moverscore": greedy(c, r)[1],
            "rouge1": list(rouge_n_oracle(word_tokenize(summ), word_tokenize(doc), 1)),
            "rouge2": list(rouge_n_oracle(word_tokenize(summ), word_tokenize(doc), 2)),
            "rougeL": list(rouge_l_oracle(word_tokenize(summ), word_tokenize(doc))),
        }
        vec = lambda s: sentence_vec(sent_by_text[s])  # noqa: E731
        for weighting in ("none", "sum", "entropy"):
            entry[f"sentence_cosine_{weighting}"] = list(sentence_score(ds, ss, vec, weighting))
        goldens.append(entry)

    # Sentence-pair goldens for the ONNX backend.
    s0, s1 = split_sentences(corpus.PAIRS[0][0])[:2]
    v0, v1 = sentence_vec(token_item(encoder, tok, "a", s0)), sentence_vec(token_item(encoder, tok, "b", s1))
    nli_pair = (corpus.PAIRS[1][0].split(". ")[0] + ".", corpus.PAIRS[1][1])
    dump_json(
        os.path.join(OUT, "pair_goldens.json"),
        {
            "pairs": goldens,
            "sentence_cosine": {"left": s0, "right": s1, "cosine": float(v0 @ v1)},
            "nli": {
                "premise": nli_pair[0],
                "hypothesis": nli_pair[1],
                "probs": nli_probs(nli, tok, *nli_pair),
                "self": {"text": s0, "probs": nli_probs(nli, tok, s0, s0)},
            },
        },
    )
    _ = nli_lookup

    cat = token_item(encoder, tok, "cat", corpus.CAT_TEXT)
    dump_json(os.path.join(OUT, "cat_golden.json"), fixture_file([cat]))

    build_bench(encoder, tok, rng)
    print("fixtures written to", OUT)


def build_bench(encoder, tok, rng):
    aspects = ["relevance", "coherence"]
    lines = [{"kind": "meta", "name": "bench", "aspects": aspects}]
    for did, text, group in corpus.BENCH_DOCS:
        lines.append({"kind": "doc", "id": did, "text": text, "group": group})
    summaries = []
    for did, sums in corpus.BENCH_SUMMARIES.items():
        for k, text in enumerate(sums):
            rel = [5, 2, 4, 1][k] if did != "d2" else [4, 3, 4, 1][k]
            coh = [4, 4, 5, 2][k] if did != "d3" else 3
            summaries.append((did, f"sys{k}", text, {"relevance": float(rel), "coherence": float(coh)}))
            lines.append(
                {
                    "kind": "sum",
                    "doc_id": did,
                    "system_id": f"sys{k}",
                    "text": text,
                    "ratings": {"relevance": float(rel), "coherence": float(coh)},
                }
            )
    with open(os.path.join(OUT, "bench.jsonl"), "w", encoding="utf-8", newline="\n") as f:
        for obj in lines:
            f.write(json.dumps(obj, ensure_ascii=False) + "\n")

    texts = []
    for _, t, _ in corpus.BENCH_DOCS:
        texts.append(t)
        texts += split_sentences(t)
    for _, _, t, _ in summaries:
        texts.append(t)
        texts += split_sentences(t)
    uniq = []
    for t in texts:
        if t not in uniq:
            uniq.append(t)
    items = [token_item(encoder, tok, f"b{i}", t) for i, t in enumerate(uniq)]
    dump_json(os.path.join(OUT, "bench_tokens.json"), fixture_file(items))
    vec_of = {it["text"]: it for it in items}

    external = {}
    with open(os.path.join(OUT, "bench_external.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("# metric=blanc-ext\n")
        f.write("doc_id,system_id,score\n")
        for did, sid, _, _ in summaries:
            val = round(rng.uniform(0, 1), 4)
            external[(did, sid)] = val
            f.write(f"{did},{sid},{val}\n")

    doc_text = {d: t for d, t, _ in corpus.BENCH_DOCS}
    groups = {}
    for d, _, g in corpus.BENCH_DOCS:
        if g:
            groups.setdefault(g, []).append(d)
    doc_group = {d: g for d, _, g in corpus.BENCH_DOCS}

    def docs_for(did):
        g = doc_group[did]
        return groups[g] if g else [did]

    def lead(text, k):
        ss = split_sentences(text)
        return " ".join(ss[: math.ceil(k * len(ss))])

    def multi(did, fn):
        return sum(fn(doc_text[d]) for d in docs_for(did))

    def items_of(t):
        return vec_of[t]["vectors"]

    suite = [
        ("bertscore", "f", lambda s, d: greedy(items_of(s), items_of(d))[2]),
        ("bertscore", "p", lambda s, d: greedy(items_of(s), items_of(d))[0]),
        ("rouge-1", "r", lambda s, d: rouge_n_oracle(word_tokenize(s), word_tokenize(d), 1)[1]),
        ("rouge-l@lead0.5", "r", lambda s, d: rouge_l_oracle(word_tokenize(s), word_tokenize(lead(d, 0.5)))[1]),
        ("moverscore", "scalar", lambda s, d: greedy(items_of(s), items_of(d))[1]),
        (
            "sentbert-cosine-sum",
            "f",
            lambda s, d: sentence_score(
                split_sentences(d), split_sentences(s), lambda x: sentence_vec(vec_of[x]), "sum"
            )[2],
        ),
    ]

    rows = []
    for name, comp, fn in suite:
        scores = {(did, sid): multi(did, lambda d, t=text: fn(t, d)) for did, sid, text, _ in summaries}
        rows += correlation_rows(name, comp, scores, summaries, aspects, doc_group)
    rows += correlation_rows("blanc-ext", "scalar", external, summaries, aspects, doc_group)
    dump_json(os.path.join(OUT, "bench_golden.json"), {"dataset": "bench", "pooling": "per_doc_mean", "rows": rows})


def correlation_rows(name, comp, scores, summaries, aspects, doc_group):
    rows = []
    for aspect in aspects:
        units = {}
        for did, sid, _, ratings in summaries:
            unit = doc_group[did] or did
            units.setdefault(unit, []).append((scores[(did, sid)], ratings[aspect]))
        sp, pe = [], []
        for unit in sorted(units):
            xs = [a for a, _ in units[unit]]
            ys = [b for _, b in units[unit]]
            if len(xs) < 2:
                continue
            s = spearman_or_none(xs, ys)
            p = pearson_or_none(xs, ys)
            if s is not None:
                sp.append(s)
            if p is not None:
                pe.append(p)
        rows.append(
            {
                "metric": name,
                "component": comp,
                "aspect": aspect,
                "spearman": float(np.mean(sp)) if sp else None,
                "pearson": float(np.mean(pe)) if pe else None,
                "n_units": len(sp),
            }
        )
    return rows


if __name__ == "__main__":
    main()
