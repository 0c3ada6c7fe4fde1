#!/usr/bin/env python3
# Copyright 2026 The TALENT Harness Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the checked-in test fixtures under tests/data.

Golden wire bodies and digests are computed here with the Python standard
library, independently of the C++ serializer they check.
"""

import hashlib
import json
import os
import random

from PIL import Image, ImageDraw

HERE = os.path.dirname(os.path.abspath(__file__))


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def jsonl(rows):
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)


def table_png(path, width, height, seed):
    rng = random.Random(seed)
    img = Image.new("RGB", (width, height), (255, 255, 255))
    d = ImageDraw.Draw(img)
    rows, cols = 4, 3
    for r in range(rows + 1):
        y = r * (height - 1) // rows
        d.line([(0, y), (width - 1, y)], fill=(0, 0, 0))
    for c in range(cols + 1):
        x = c * (width - 1) // cols
        d.line([(x, 0), (x, height - 1)], fill=(0, 0, 0))
    for r in range(rows):
        for c in range(cols):
            shade = tuple(rng.randrange(60, 250) for _ in range(3))
            x0 = c * (width - 1) // cols + 2
            y0 = r * (height - 1) // rows + 2
            x1 = (c + 1) * (width - 1) // cols - 2
            y1 = (r + 1) * (height - 1) // rows - 2
            if x1 > x0 and y1 > y0:
                d.rectangle([x0, y0, x1, y1], fill=shade)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    img.save(path, format="PNG")


CATEGORIES = ["financial_reports", "sports_statistics", "survey_results",
              "scientific_tables"]
PREFIX = {"financial_reports": "fin", "sports_statistics": "spo",
          "survey_results": "sur", "scientific_tables": "sci"}


def retabvqa():
    root = os.path.join(HERE, "retabvqa")
    rows = [{"type": "meta", "name": "retabvqa-fixture", "kind": "retabvqa",
             "declared_counts": {"tables_per_category": 15, "qa_per_table": 2}}]
    qa = []
    seed = 0
    for cat in CATEGORIES:
        for i in range(1, 16):
            tid = "%s%02d" % (PREFIX[cat], i)
            seed += 1
            table_png(os.path.join(root, "images", tid + ".png"), 36 + i, 24 + i, seed)
            rows.append({"type": "table", "table_id": tid,
                         "image_path": "images/%s.png" % tid, "category": cat,
                         "source_split": "test"})
            base = 100 + 7 * seed
            qa.append({"type": "qa", "qa_id": tid + "-q1", "table_id": tid,
                       "question": "What is the total of the first column?",
                       "answer": "%d" % (base * 3), "reasoning_tag": "multi_step"})
            qa.append({"type": "qa", "qa_id": tid + "-q2", "table_id": tid,
                       "question": "By what percent did the value increase?",
                       "answer": "%.2f%%" % (seed * 1.37), "reasoning_tag": "multi_step"})
    write(os.path.join(root, "manifest.jsonl"), jsonl(rows + qa))


MINI = [
    # table_id, category, gt table, question, answer, reply
    ("t01", "financial_reports", "| Year | Revenue (in millions) |\n|---|---|\n| 2019 | 4,124 |",
     "What was the revenue in 2019?", "4,124",
     "The revenue in 2019 was $4,124 million."),
    ("t02", "sports_statistics", "| Player | Goals |\n|---|---|\n| Ito | 17 |",
     "How many goals did Ito score?", "17", "Ito scored 17 goals."),
    ("t03", "survey_results", "| Answer | Share |\n|---|---|\n| Yes | 18.55% |",
     "What share answered yes?", "18.55%", "18.55 percent of respondents answered yes."),
    ("t04", "scientific_tables", "| Sample | Mass (g) |\n|---|---|\n| A | 1,529.13 |",
     "What is the mass of sample A?", "1,529.13", "Sample A has a mass of 1529.13 g."),
    ("t05", "financial_reports", "| Item | Units |\n|---|---|\n| Options | 196 |",
     "How many units were outstanding?", "196", "196 units were outstanding."),
    ("t06", "sports_statistics", "| Team | Wins |\n|---|---|\n| Hawks | 52 |",
     "How many wins did the Hawks have?", "52", "The Hawks had 48 wins."),
    ("t07", "survey_results", "| Region | Respondents |\n|---|---|\n| North | 1,204 |",
     "How many respondents were in the North?", "1,204",
     "There were 1,204 respondents in the North region."),
    ("t08", "scientific_tables", "| Trial | Yield (%) |\n|---|---|\n| 3 | 72.5 |",
     "What was the yield of trial 3?", "72.5", "Trial 3 had a yield of 72.5 percent."),
    ("t09", "financial_reports", "| Quarter | Net income ($) |\n|---|---|\n| Q4 | 88,310 |",
     "What was the net income in Q4?", "88,310", "Net income in Q4 was $88,310."),
    ("t10", "scientific_tables", "| Compound | Boiling point (C) |\n|---|---|\n| X | 351 |",
     "What is the boiling point of compound X?", "351",
     "Compound X boils at 351 degrees Celsius."),
]


def mini():
    root = os.path.join(HERE, "mini")
    rows = [{"type": "meta", "name": "mini", "kind": "tablevqa_bench_like"}]
    qa = []
    rules = []
    for n, (tid, cat, gt, question, answer, reply) in enumerate(MINI, start=1):
        w, h = (1400, 700) if tid == "t10" else (48 + 9 * n, 30 + 5 * n)
        table_png(os.path.join(root, "images", tid + ".png"), w, h, 1000 + n)
        rows.append({"type": "table", "table_id": tid, "image_path": "images/%s.png" % tid,
                     "category": cat, "gt_table_text": gt, "source_split": "test"})
        qa.append({"type": "qa", "qa_id": "q" + tid[1:], "table_id": tid,
                   "question": question, "answer": answer, "reasoning_tag": "lookup"})
        rules.append({"stage": "ocr", "image": tid, "reply": gt})
        rules.append({"stage": "narration", "image": tid,
                      "reply": "Table %s has two columns. %s" % (tid, gt.splitlines()[0])})
        rules.append({"stage": "direct", "image": tid, "reply": answer.split(".")[0]})
        rules.append({"stage": "reason", "contains": question, "reply": reply})
    write(os.path.join(root, "manifest.jsonl"), jsonl(rows + qa))
    write(os.path.join(root, "script.json"),
          json.dumps({"rules": rules}, indent=2, ensure_ascii=False) + "\n")


def unit_omission():
    root = os.path.join(HERE, "unit_omission")
    table_png(os.path.join(root, "images", "warranty.png"), 320, 120, 77)
    gt = ("(in thousands) | 2010 | 2009\n---|---|---\n"
          "Warranty reserve, beginning of year | 10,519 | 9,871\n"
          "Warranty reserve, December 31 | 11,832 | 10,519")
    rows = [{"type": "meta", "name": "unit_omission", "kind": "tablevqa_bench_like"},
            {"type": "table", "table_id": "warranty", "image_path": "images/warranty.png",
             "category": "financial_reports", "gt_table_text": gt, "source_split": "case"},
            {"type": "qa", "qa_id": "warranty-q1", "table_id": "warranty",
             "question": "What is the value of the Warranty reserve on December 31, 2010?",
             "answer": "11,832,000", "reasoning_tag": "lookup"}]
    ocr = ("| | 2010 | 2009 |\n|---|---|---|\n"
           "| Warranty reserve, beginning of year | 10,519 | 9,871 |\n"
           "| Warranty reserve, December 31 | 11,832 | 10,519 |")
    narration = ("The table reports the warranty reserve for 2010 and 2009. The top-left "
                 "corner states that all amounts are (in thousands). The reserve on "
                 "December 31, 2010 is 11,832.")
    script = {"rules": [
        {"stage": "ocr", "image": "warranty", "reply": ocr},
        {"stage": "narration", "image": "warranty", "reply": narration},
        {"stage": "direct", "image": "warranty", "reply": "11,832"},
        {"stage": "reason", "contains": "(in thousands)",
         "reply": "The value of the Warranty reserve on December 31, 2010, was $11,832,000."},
        {"stage": "reason", "reply": "11,832"},
    ]}
    write(os.path.join(root, "manifest.jsonl"), jsonl(rows))
    write(os.path.join(root, "script.json"), json.dumps(script, indent=2) + "\n")


def misc():
    root = os.path.join(HERE, "images")
    os.makedirs(root, exist_ok=True)
    Image.new("RGB", (40, 20), (200, 30, 60)).save(
        os.path.join(root, "solid.jpg"), format="JPEG", quality=95)
    rgba = Image.new("RGBA", (4, 2), (0, 0, 0, 0))
    rgba.putpixel((1, 0), (0, 0, 0, 255))
    rgba.putpixel((2, 0), (100, 50, 0, 128))
    rgba.save(os.path.join(root, "alpha.png"), format="PNG")
    with open(os.path.join(root, "corrupt.png"), "wb") as f:
        f.write(b"\x89PNG\r\n\x1a\nthis is not a png")


# A 1x1 white PNG; the golden digests depend only on this string.
TINY_PNG_B64 = ("iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAIAAACQd1PeAAAADElEQVR4nGP4//8/"
                "AAX+Av4N70a4AAAAAElFTkSuQmCC")


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def golden():
    root = os.path.join(HERE, "golden")
    text_only = {
        "model": "qwen2.5-7b-instruct", "temperature": 0.1, "top_p": 0.9,
        "max_tokens": 2048,
        "messages": [
            {"role": "system", "content": "You are a careful analyst."},
            {"role": "user", "content": "Price: 12 € per unit.\nHow many units?"},
        ],
    }
    url = "data:image/png;base64," + TINY_PNG_B64
    with_image = {
        "model": "qwen2.5-vl-3b-instruct", "temperature": 0.1, "top_p": 0.9,
        "max_tokens": 2048,
        "messages": [
            {"role": "system", "content": "Describe the table."},
            {"role": "user", "content": [
                {"type": "image_url", "image_url": {"url": url}},
                {"type": "text", "text": "What is in the first row?"},
            ]},
        ],
    }
    hashed = json.loads(json.dumps(with_image))
    hashed["messages"][1]["content"][0]["image_url"]["url"] = (
        "sha256:" + hashlib.sha256(TINY_PNG_B64.encode()).hexdigest())
    digests = {
        "text_only": hashlib.sha256(canonical(text_only).encode("utf-8")).hexdigest(),
        "with_image": hashlib.sha256(canonical(hashed).encode("utf-8")).hexdigest(),
    }
    compact = lambda o: json.dumps(o, separators=(",", ":"), ensure_ascii=False)
    write(os.path.join(root, "request_text_only.json"), compact(text_only))
    write(os.path.join(root, "request_with_image.json"), compact(with_image))
    write(os.path.join(root, "digests.json"), json.dumps(digests, indent=2) + "\n")
    write(os.path.join(root, "tiny_png.b64"), TINY_PNG_B64)


if __name__ == "__main__":
    retabvqa()
    mini()
    unit_omission()
    golden()
    misc()
