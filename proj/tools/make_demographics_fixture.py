#!/usr/bin/env python3
"""Writes the synthetic 53-record export used by the demographics tests.

34 respondents have a Polish locale and 23 report migration experience, the
counts of the published evaluation sample. Everything else is arbitrary but
seeded, so the file is reproducible.
"""
import csv
import random
import sys

COLUMNS = (
    ["Id", "Fb_Id", "First_name", "Last_name", "Locale", "Hometown", "Timezone", "Birthday", "Gender"]
    + [f"TIPIPL_odp_{i}" for i in range(1, 11)]
    + ["TIPIPL_ekstarwersja", "TIPIPL_ugodowosc", "TIPIPL_sumiennosc", "TIPIPL_stabilnosc", "TIPIPL_otwartosc"]
    + ["DopKomp_czy_pracujesz", "DopKomp_odp_num_1"]
    + [f"Inter_odp_{i}" for i in range(1, 11)]
    + ["Record_created", "Jezyk", "Profile_pic", "Age", "It_skils", "Immigrant", "Device"]
)
KEYING = [(1, 6), (7, 2), (3, 8), (9, 4), (5, 10)]


def tenth(v):
    return f"{v:.1f}"


def main(out):
    rng = random.Random(53)
    locales = ["pl_PL"] * 34 + ["uk_UA"] * 17 + ["en_US"] * 2
    immigrant = [1] * 23 + [0] * 30
    devices = ["computer"] * 31 + ["mobile phone"] * 20 + ["other"] * 2
    genders = ["female"] * 29 + ["male"] * 22 + [None] * 2
    for lst in (immigrant, devices, genders):
        rng.shuffle(lst)
    towns = {"pl_PL": ["Kraków", "Łódź", "Wrocław", "Gdańsk"], "uk_UA": ["Київ", "Львів", "Харків"],
             "en_US": ["Boston"]}
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(COLUMNS)
    for i in range(53):
        loc = locales[i]
        tipi = [rng.randint(1, 7) for _ in range(10)]
        traits = [(tipi[d - 1] + 8 - tipi[r - 1]) / 2 for d, r in KEYING]
        employed = rng.random() < 0.7
        comp = ";".join(str(rng.randint(1, 5)) for _ in range(26)) if employed else None
        sus = [rng.randint(3, 5) if k % 2 == 0 else rng.randint(1, 3) for k in range(10)]
        lang = loc[:2]
        row = [str(i + 1), f"fb-{1000 + i}", f"Name{i}", f"Surname{i}", loc, rng.choice(towns[loc]),
               "2" if loc != "uk_UA" else "3", None, genders[i]]
        row += [str(v) for v in tipi] + [tenth(t) for t in traits]
        row += ["yes" if employed else "no", comp] + [str(v) for v in sus]
        row += [f"2022-05-{1 + i % 28:02d}T10:{i % 60:02d}:00.000Z", lang, None, str(rng.randint(19, 64)),
                str(rng.randint(1, 5)), str(immigrant[i]), devices[i]]
        writer.writerow(["" if c is None else c for c in row])


if __name__ == "__main__":
    main(sys.stdout)
