#!/usr/bin/env python3
"""Regenerate kb_data/lexicon/dictionary.txt.

The dictionary is the spell checker's word list: common English words,
clinical terms, every vocabulary-phrase word, and every stopword, each
with a rough corpus frequency used for ranking correction candidates
(higher wins among equal edit distances). Clinical vocabulary words get
the highest weights so typos resolve toward them.

Also verifies that every word used in the shipped note corpus is covered,
so clean-text extraction never takes the correction path by accident.
"""

from __future__ import annotations

import sys
from pathlib import Path

KB = Path(__file__).resolve().parent.parent / "src" / "vbdss" / "kb_data"

COMMON = """
about above accept across act action add addition address advice advise again age ago agree
air all allow almost alone along already although always among amount animal announce another
answer any anyone anything appear apply area arm around arrive ask attend aunt avoid away
baby back bad bag balance base basic bath bear beat because become bed begin behind believe
below beside best better between big bird bit bite black bleed blood blue board boat body boil
bone book born both bottle bottom bowel box boy brain bread break breakfast breath breathe
bring brother brought brown build burn bus business busy buy call calm came can car card care
careful carry case cat catch cause cell center certain chair chance change check chest child
children choice choose city class clean clear climb clinic close cloth clothes cold collect
college color come comfort common complain complete concern condition confirm consider contact
continue control cook cool copy corner correct cost cotton cough could count country course
cover cream cross cry cup cure current cut daily damage danger dark date daughter day dead
deal dear death decide decrease deep degree deliver demand dental depend describe desk detail
develop diet differ difficult dinner direct dirty discuss disease district dizzy doctor does
dog done door dose double down dream dress drink drive drop drug dry due dull duty each ear
early earn ease east easy eat edge effect effort egg eight either elbow else emergency empty
end enjoy enough enter entire escape even evening event ever every evidence exact examine
example except exercise expect explain express extra eye face fact fail fair fall family far
farm fast fat father fault fear feed feel feet fell felt female fever few field fight figure
fill film final find fine finger finish fire first fish fit five fix floor flow flu fluid
follow food foot force forget form found four free fresh friend front fruit full further gain
game garden gas gave general gentle get girl give glad glass goes gold gone good got grand
great green ground group grow growth guess guide hair half hand happen happy hard harm head
heal health healthy hear heart heat heavy height hello help here high hill history hold hole
holiday home hope hospital hot hour house how huge human hundred hungry hurt husband idea ill
illness improve inch include increase indeed infect inform injury inside instead intake iron
issue item join joint judge jump just keep kept key kick kid kind knee knew know known lab
lack lady land large last late laugh lead leave left leg length less let letter level lie life
lift light like limit line lip liquid list listen little live liver local long look lose loss
lost lot loud love low lunch lung made main make male man manage many mark market marry mass
match matter may meal mean measure medical medicine meet member men mention middle might mild
milk mind mine minute miss mix moment money month mood moon more morning most mother mouth
move much muscle must name near nearly neck need nerve never new next nice night nine normal
north nose note nothing notice now number nurse object observe occur ocean offer office often
oil old once one only open order other our out outside own page pain pale paper parent part
pass past pay peace pen people period person phone pick picture piece pill place plan plant
play please plenty point poor position possible pour power practice prepare present press
pressure pretty prevent previous price print prior problem process produce program progress
promise proper protect prove provide public pull pulse push put quality question quick quiet
quite raise ran range rapid rate rather reach read ready real reason receive recent record
recover red reduce refer regular relate relax relief remain remember remove repeat report
request require rest result return review rice rich ride right ring rise risk river road rock
roll room rough round rub rule run rush sad safe said salt same save saw say scale school
season seat second see seem seen self sell send sense sent serious serve service set settle
seven several severe shake shall shape share sharp shift shine ship shirt shock shoe short
should shoulder show shower sick side sign simple since sing single sister sit site six size
skin sleep slight slow small smell smile smooth sneeze social soft some son soon sore sorry
sound south space speak special speed spell spend spent spread spring stable staff stage stand
start state stay steady step stick still stomach stool stop store storm story straight strain
strange stream street strength stress stretch strike strong study stuff subject sudden sugar
suggest summer sun supply support sure surface swallow sweet swell swim symptom system table
take talk tall taste tea teach team tear teeth tell ten tend tender term test than thank them
thick thin thing think third thirst thought thousand three throat through throw thumb thus
time tired today toe together told tomorrow tongue tonight took tooth top total touch toward
town trace track train travel treat treatment tree trip trouble true trust try turn twice two
type under understand unit until unwell update urge urine use usual value various vein verify
view village visit voice wait wake walk wall want warm wash watch water wave way weak wear
weather week weigh weight well went west wet what wheel when where which while white who whole
why wide wife will wind window winter wish without woman women wood word wore work world worry
worse worst would wound wrist write wrong year yellow yes yesterday yet young
""".split()

MEDICAL = """
abdomen abdominal acute admission ambulance appetite aspiration assay aspirin bandage bilateral
biopsy bite bites bitten bleeding blister bloated capsule cardiac checkup chest chronic
clinical consult consultation dehydration dengue diagnose diagnosis diarrhea discharge dizziness
dosage duration encephalitis endemic epidemic examination exhaustion fatigue febrile filaria
filariasis follicle gland glands hemoglobin hemorrhage hemorrhagic hepatitis hygiene immune
immunity infection infections inflamed inflammation injection inspect intake intravenous itching
jaundice kala azar laboratory leishmania lesion lethargy ligament limb limbs lymph lymphatic
malaria manifestation manifestations microscopy mosquito mosquitoes muscular nauseous needle
nocturnal outbreak palpitation parasite parasites pathology photo physician plasma platelet
platelets positive negative prescription pupil pus pyrexia referral rigors saline sample
samples sandfly scan screening serum sinus smear specimen spleen stiffness swab sweating
swelling swollen syndrome syringe tablet tablets temperature tender tenderness therapy thermal
tissue tonsil tourniquet toxin transfusion tremor tropical ulcer urgent vaccination vaccine
vector vertigo viral virus vital vitals vomit ward wards wound wounds
""".split()

HIGH_FREQ_CLINICAL = {
    "fever": 900,
    "chills": 700,
    "headache": 800,
    "nausea": 650,
    "vomiting": 640,
    "rash": 600,
    "weakness": 580,
    "anaemia": 420,
    "anemia": 410,
    "hydrocele": 300,
    "elephantiasis": 300,
    "lymphoedema": 290,
    "lymphedema": 280,
    "appetite": 400,
    "pulse": 500,
    "pressure": 520,
    "joint": 560,
    "joints": 310,
    "muscle": 540,
    "skin": 620,
    "neck": 530,
    "stiffness": 330,
    "stiff": 320,
    "loss": 480,
    "weight": 470,
    "recurrent": 340,
    "hemorrhagic": 260,
    "manifestations": 250,
    "infection": 450,
    "mild": 430,
    "cold": 460,
    "narrow": 240,
    "rapid": 360,
    "weak": 370,
    "dry": 440,
    "bleeding": 350,
    "ache": 230,
}


def words_in(path: Path) -> set[str]:
    out: set[str] = set()
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        text = line.split("\t")[0] if path.suffix == ".tsv" else line
        for word in text.split():
            token = "".join(c for c in word.lower() if c.isalnum())
            if token and not token.isdigit():
                out.add(token)
    return out


def main() -> int:
    lexicon = KB / "lexicon"
    entries: dict[str, int] = {}
    for word in COMMON:
        entries[word] = max(entries.get(word, 0), 100)
    for word in MEDICAL:
        entries[word] = max(entries.get(word, 0), 200)
    for word, freq in HIGH_FREQ_CLINICAL.items():
        entries[word] = max(entries.get(word, 0), freq)
    for word in words_in(lexicon / "vocabulary.tsv"):
        entries[word] = max(entries.get(word, 0), 600)
    for word in words_in(lexicon / "stopwords.txt"):
        entries[word] = max(entries.get(word, 0), 1000)

    bad = [w for w in entries if not w.isascii() or not w.isalpha()]
    if bad:
        print(f"non-ascii or non-alpha entries: {bad}", file=sys.stderr)
        return 1

    corpus = KB / "corpus"
    added: set[str] = set()
    if corpus.is_dir():
        for note in sorted(corpus.glob("*.txt")):
            for word in words_in(note):
                if word not in entries:
                    entries[word] = 50
                    added.add(word)
    if added:
        print(f"added {len(added)} corpus words at base frequency: {sorted(added)}")

    out = lexicon / "dictionary.txt"
    lines = ["# word <TAB> corpus frequency (generated by scripts/build_lexicon.py)"]
    lines += [f"{w}\t{f}" for w, f in sorted(entries.items())]
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(entries)} words to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
