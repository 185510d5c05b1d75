#!/usr/bin/env python3
"""Writes citation_oracle.jsonl: 50 hand-labeled citation strings.

Each entry wraps one citation shape taken from published German decisions
in a sentence and lists the references a reader would extract from it:
law citations with code and first section number, case citations with the
docket as printed. Labels are written by hand, not produced by the tool.
"""

import json
import sys
from pathlib import Path


def law(raw, code, *sections):
    return [{"ref_type": "law", "raw_text": raw, "code": code, "section": s} for s in sections]


def case(docket):
    return [{"ref_type": "case", "raw_text": docket, "docket": docket}]


ORACLE = [
    ("Der Anspruch folgt aus § 543 Abs. 2 BGB.", law("§ 543 Abs. 2 BGB", "BGB", "543")),
    ("Ein Anspruch aus §§ 242, 826 BGB besteht nicht.", law("§§ 242, 826 BGB", "BGB", "242", "826")),
    ("Die Kostenentscheidung beruht auf § 91 ZPO.", law("§ 91 ZPO", "ZPO", "91")),
    ("Die Vollstreckbarkeit folgt aus §§ 708 Nr. 11, 711 ZPO.",
     law("§§ 708 Nr. 11, 711 ZPO", "ZPO", "708", "711")),
    ("Verletzt ist Art. 3 Abs. 1 GG.", law("Art. 3 Abs. 1 GG", "GG", "3")),
    ("Das Rechtsstaatsprinzip (Artikel 20 Abs. 3 GG) gebietet dies.", law("Artikel 20 Abs. 3 GG", "GG", "20")),
    ("Ein Zulassungsgrund nach § 132 Abs. 2 Nr. 1 VwGO liegt nicht vor.",
     law("§ 132 Abs. 2 Nr. 1 VwGO", "VwGO", "132")),
    ("Leistungsberechtigt ist nach § 7 Abs. 1 Satz 1 SGB II, wer erwerbsfähig ist.",
     law("§ 7 Abs. 1 Satz 1 SGB II", "SGB II", "7")),
    ("Ein Schadensersatzanspruch aus § 823 Abs. 1 BGB scheidet aus.", law("§ 823 Abs. 1 BGB", "BGB", "823")),
    ("Die Kündigungsfrist ergibt sich aus § 573c BGB.", law("§ 573c BGB", "BGB", "573c")),
    ("Der Angeklagte ist des Betruges (§ 263 StGB) schuldig.", law("§ 263 StGB", "StGB", "263")),
    ("Die Kostenentscheidung folgt aus § 154 Abs. 1 VwGO.", law("§ 154 Abs. 1 VwGO", "VwGO", "154")),
    ("Die Voraussetzungen des § 280 Abs. 1 und 3 BGB sind erfüllt.", law("§ 280 Abs. 1 und 3 BGB", "BGB", "280")),
    ("Ansprüche aus §§ 280, 281 BGB bestehen nicht.", law("§§ 280, 281 BGB", "BGB", "280", "281")),
    ("Das Recht der öffentlichen Wiedergabe (§ 15 Abs. 2 UrhG) ist betroffen.",
     law("§ 15 Abs. 2 UrhG", "UrhG", "15")),
    ("Das Verfahren wurde nach § 170 Abs. 2 StPO eingestellt.", law("§ 170 Abs. 2 StPO", "StPO", "170")),
    ("Der Umfang des Ersatzes richtet sich nach § 249 ff. BGB.", law("§ 249 ff. BGB", "BGB", "249")),
    ("Ein Anspruch aus § 812 Abs. 1 S. 1 Alt. 1 BGB besteht nicht.",
     law("§ 812 Abs. 1 S. 1 Alt. 1 BGB", "BGB", "812")),
    ("Die Kosten der Unterkunft sind nach § 22 Abs. 1 SGB II zu übernehmen.",
     law("§ 22 Abs. 1 SGB II", "SGB II", "22")),
    ("Die Begründungspflicht folgt aus § 35 SGB X.", law("§ 35 SGB X", "SGB X", "35")),
    ("Säumniszuschläge entstehen nach § 240 AO.", law("§ 240 AO", "AO", "240")),
    ("Die Haftung des Erwerbers folgt aus § 25 HGB.", law("§ 25 HGB", "HGB", "25")),
    ("Die Kündigung ist sozial ungerechtfertigt im Sinne von § 1 KSchG.", law("§ 1 KSchG", "KSchG", "1")),
    ("Die Verfassungsbeschwerde ist nach § 90 Abs. 1 BVerfGG zulässig.",
     law("§ 90 Abs. 1 BVerfGG", "BVerfGG", "90")),
    ("Der Bescheid ist nach § 113 Abs. 1 Satz 1 VwGO aufzuheben.",
     law("§ 113 Abs. 1 Satz 1 VwGO", "VwGO", "113")),
    ("Der Kläger ist Flüchtling im Sinne des § 3 Abs. 1 AsylG.", law("§ 3 Abs. 1 AsylG", "AsylG", "3")),
    ("Ein Abschiebungsverbot nach § 60 Abs. 5 AufenthG besteht nicht.",
     law("§ 60 Abs. 5 AufenthG", "AufenthG", "60")),
    ("Ein wichtiger Grund im Sinne von § 626 Abs. 1 BGB liegt vor.", law("§ 626 Abs. 1 BGB", "BGB", "626")),
    ("Die Verarbeitung ist nach Art. 6 Abs. 1 lit. f DSGVO rechtmäßig.",
     law("Art. 6 Abs. 1 lit. f DSGVO", "DSGVO", "6")),
    ("Das Vorhaben fügt sich nicht ein (§ 34 BauGB).", law("§ 34 BauGB", "BauGB", "34")),
    ("Strafbar ist das Handeltreiben nach § 29 Abs. 1 Satz 1 Nr. 1 BtMG.",
     law("§ 29 Abs. 1 Satz 1 Nr. 1 BtMG", "BtMG", "29")),
    ("Prozesskostenhilfe ist nach § 114 Satz 1 ZPO zu versagen.", law("§ 114 Satz 1 ZPO", "ZPO", "114")),
    ("Der Streitwert folgt aus §§ 52, 53 GKG.", law("§§ 52, 53 GKG", "GKG", "52", "53")),
    ("Vgl. BGH, Urteil vom 12.01.2020 – VIII ZR 21/19, juris.", case("VIII ZR 21/19")),
    ("So auch BVerfG, Beschluss vom 2. Juni 2021 – 1 BvR 1234/20.", case("1 BvR 1234/20")),
    ("LSG Nordrhein-Westfalen, Urteil vom 3. Mai 2018 – L 9 AS 123/17.", case("L 9 AS 123/17")),
    ("Der Senat folgt BGH, Beschluss vom 5. Juli 2018 - 2 StR 345/18.", case("2 StR 345/18")),
    ("Vgl. BGH, Beschluss vom 20. Juli 2016 – XII ZB 512/15 –, FamRZ 2016, 1761.", case("XII ZB 512/15")),
    ("Siehe BVerfG, Beschluss vom 24. April 2018 – 1 BvL 7/16.", case("1 BvL 7/16")),
    ("Vgl. ECLI:DE:BGH:2020:120120UVIIIZR21.19.0.", case("ECLI:DE:BGH:2020:120120UVIIIZR21.19.0")),
    ("Ebenso ECLI:DE:BVerfG:2021:rk20210602.1bvr123420, Rn. 12.",
     case("ECLI:DE:BVerfG:2021:rk20210602.1bvr123420")),
    ("Nach BAG, Urteil vom 22. Mai 2019 – 5 AZR 123/18 ist das anders.", case("5 AZR 123/18")),
    ("Vgl. OLG Hamm, Urteil vom 4. Juni 2020 – 3 U 45/20.", case("3 U 45/20")),
    ("Vgl. BGH, Urteil vom 30. April 2020 – I ZR 143/19, GRUR 2020, 738.", case("I ZR 143/19")),
    ("VG Berlin, Urteil vom 1. März 2020 – 9 K 1234/19.", case("9 K 1234/19")),
    ("Vgl. BVerfG, Beschlüsse vom 1. Juli 2017 – 1 BvR 2011/16 und 1 BvR 2012/16.",
     case("1 BvR 2011/16") + case("1 BvR 2012/16")),
    ("BGH, Urteil vom 11. Januar 2012 – IV ZR 76/11, NJW 2012, 1003.", case("IV ZR 76/11")),
    ("Der Anspruch folgt aus § 433 Abs. 2 BGB (vgl. BGH, Urteil vom 12.01.2020 – VIII ZR 21/19).",
     law("§ 433 Abs. 2 BGB", "BGB", "433") + case("VIII ZR 21/19")),
    ("Dieser Satz enthält keine Referenz.", []),
    ("Die Frist von 2 Wochen nach Zustellung am 12.01.2020 ist gewahrt.", []),
]


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    assert len(ORACLE) == 50, len(ORACLE)
    with open(out_dir / "citation_oracle.jsonl", "w", encoding="utf-8") as f:
        for text, expected in ORACLE:
            f.write(json.dumps({"text": text, "expected": expected}, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
