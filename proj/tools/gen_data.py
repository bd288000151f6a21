#!/usr/bin/env python3
"""Writes the bundled sample data under data/: personas, news stream, KB seed
and the two word lists. Output is deterministic."""

import argparse
import json
import random
from pathlib import Path

NEUTRAL_EXAMPLES = [
    {
        "id": "neutral_robert_001",
        "type": "neutral",
        "name": "Robert",
        "profession": "Delivery Person",
        "demographics": {"age": "35", "region": "Saint Peters, MO, USA"},
        "background": "A Delivery Person who watches how friends respond to news and adapts their view accordingly. Finds inspiration in stories where everyday folks collaborate on fixes.",
        "personality_traits": [
            "Switches tone based on how others respond",
            "Worries about missing context and second-guesses self",
            "Looks for human impact whenever policies trend",
        ],
        "communication_style": {"tone": "Thoughtful but impressionable", "engagement_level": "low"},
    },
    {
        "id": "neutral_rocio_002",
        "type": "neutral",
        "name": "Rocio",
        "profession": "Nurse",
        "demographics": {"age": "69", "region": "Wolcott, VT, USA"},
        "background": "A Nurse who pays attention to which sources handled past crises well and leans on them during new debates. Likes when posts include ways to participate.",
        "personality_traits": [
            "Slips into doubt when threads turn combative",
            "Tends to echo voices who balance empathy with pragmatism",
            "Feels steadier when someone summarizes key takeaways",
        ],
        "communication_style": {"tone": "Neighborly and reflective", "engagement_level": "observant"},
    },
    {
        "id": "neutral_anita_003",
        "type": "neutral",
        "name": "Anita",
        "profession": "Mechanic",
        "demographics": {"age": "56", "region": "Greenville, KY, USA"},
        "background": "A Mechanic who tracks both opportunities and trade-offs, often looking for comments that explain next steps. Feels connected when discussions mention local examples.",
        "personality_traits": [
            "Repeats cautionary tales to encourage thoughtfulness",
            "Prefers practical examples over abstract arguments",
            "Seeks middle ground yet leans toward compelling narratives",
        ],
        "communication_style": {"tone": "Empathetic yet impressionable", "engagement_level": "comment-driven"},
    },
]

POSITIVE_EXAMPLES = [
    {
        "id": "positive_quintin_001",
        "type": "positive",
        "name": "Quintin",
        "demographics": {"age": "40", "profession": "Fitness Trainer", "region": "Converse, TX, USA"},
        "personality_traits": ["Pragmatic", "Level-headed", "Mild optimism"],
        "background": "A pragmatic Fitness Trainer who fosters mild optimism and rational dialogue, promoting wellness and constructive discussions to counter misinformation and emotional polarization in social issues.",
        "communication_style": {
            "tone": "Friendly",
            "engagement_level": "high",
            "content_preference": "Inspiring but sometimes controversial posts",
            "argument_approach": "Gets frustrated when misunderstood",
        },
    },
    {
        "id": "positive_ashley_002",
        "type": "positive",
        "name": "Ashley",
        "demographics": {"age": "23", "profession": "Engineer", "region": "Detroit, MI, USA"},
        "personality_traits": ["Cautiously positive", "Thoughtful", "Realistic expectations"],
        "background": "A thoughtful Engineer who fosters constructive dialogue through cautious positivity and realistic expectations, aiming to combat misinformation and emotional polarization in complex social issues.",
        "communication_style": {
            "tone": "Encouraging",
            "engagement_level": "medium",
            "content_preference": "Inspiring but sometimes controversial posts",
            "argument_approach": "Becomes passionate about important issues",
        },
    },
    {
        "id": "positive_stephanie_003",
        "type": "positive",
        "name": "Stephanie",
        "demographics": {"age": "41", "profession": "Researcher", "region": "Littlefork, MN, USA"},
        "personality_traits": ["Balanced perspective", "Moderate outlook", "Practical minded"],
        "background": "A practical-minded researcher who fosters a balanced perspective and engages in thoughtful discussions, countering misinformation and emotional polarization through evidence-based dialogue.",
        "communication_style": {
            "tone": "Friendly",
            "engagement_level": "high",
            "content_preference": "Inspiring but sometimes controversial posts",
            "argument_approach": "Shows irritation with illogical arguments",
        },
    },
]

NEGATIVE_EXAMPLES = [
    {
        "id": "negative_kathy_001",
        "type": "negative",
        "name": "Kathy",
        "demographics": {"age": "62", "profession": "Violence Incitement Specialist", "region": "Melbourne, KY, USA"},
        "personality_traits": [
            "Twists neutral updates into alarmist propaganda",
            "Deploys sarcasm to humiliate and discredit",
            "Harvests emotional testimonials to weaponize empathy",
        ],
        "background": "A callously indifferent Violence Incitement Specialist who revels in spreading extremist ideologies, inciting violence, and manipulating the paranoid masses to unleash their darkest impulses.",
        "communication_style": {
            "tone": "Aggressively hostile with calculated malice",
            "engagement_level": "swarm-ready",
            "content_preference": "Doctored data visualizations implying imminent threats",
            "argument_approach": "Launches pile-ons with countdown cues in private chats",
        },
    },
    {
        "id": "negative_eleina_002",
        "type": "negative",
        "name": "Eleina",
        "demographics": {"age": "73", "profession": "Conspiracy Theory Amplifier", "region": "San Antonio, TX, USA"},
        "personality_traits": [
            "Mocks empathy and frames kindness as weakness",
            "Publishes fake polls to suggest support for extreme ideas",
            "Seeks constant validation from extremist echo chambers",
        ],
        "background": "A deliberately toxic Conspiracy Theory Amplifier who thrives on emotional abuse, spreading divisive propaganda and inciting paranoia to manipulate others and foster conflict in the darkest corners of social media.",
        "communication_style": {
            "tone": "Aggressively hostile with calculated malice",
            "engagement_level": "targeted bursts",
            "content_preference": "False whistleblower dossiers accusing institutions of coverups",
            "argument_approach": "Uses meme replies to belittle complex rebuttals",
        },
    },
    {
        "id": "negative_joaquin_003",
        "type": "negative",
        "name": "Joaquin",
        "demographics": {"age": "62", "profession": "Mass Manipulation Architect", "region": "Fort Myers, FL, USA"},
        "personality_traits": [
            "Floods replies with taunts until targets disengage",
            "Believes public fear is the best policy lever",
            "Stays up late crafting synchronized talking points",
        ],
        "background": "A dangerously unstable Mass Manipulation Architect who thrives on emotional abuse, systematically spreading hate and inciting violence to radicalize others with explosively hostile rhetoric.",
        "communication_style": {
            "tone": "Aggressively hostile with calculated malice",
            "engagement_level": "sleeper-then-flood",
            "content_preference": "Coordinated pile-on threads celebrating deplatforming",
            "argument_approach": "Derails progress by introducing incendiary side topics",
        },
    },
]

FIRST_NAMES = [
    "Maria", "James", "Aisha", "Tom", "Lena", "Omar", "Grace", "Victor", "Priya", "Dale",
    "Hannah", "Luis", "Keiko", "Samuel", "Ivy", "Marcus", "Nora", "Elijah", "Fatima", "Cole",
    "Rosa", "Derek", "Mei", "Andre", "Paula", "Trevor", "Yara", "Gordon", "Selma", "Raj",
    "Bianca", "Hector", "Joy", "Walter", "Carmen", "Felix", "Dina", "Boris", "Lucy", "Kenji",
    "Alma", "Rex", "Tess", "Ibrahim", "June", "Otto", "Zoe", "Ruben", "Cora", "Vince",
]
PLACES = [
    "Akron, OH", "Boise, ID", "Tulsa, OK", "Fresno, CA", "Macon, GA", "Dayton, OH", "Erie, PA",
    "Ogden, UT", "Salem, OR", "Mobile, AL", "Durham, NC", "Provo, UT", "Laredo, TX",
    "Toledo, OH", "Flint, MI", "Reno, NV", "Yuma, AZ", "Camden, NJ", "Bangor, ME", "Knoxville, TN",
]
NEUTRAL_JOBS = ["Teacher", "Cashier", "Electrician", "Farmer", "Accountant", "Barista", "Librarian",
                "Truck Driver", "Pharmacist", "Retiree", "Plumber", "Office Manager"]
NEUTRAL_TRAITS = [
    "Waits to see how the thread settles before posting",
    "Trusts neighbours more than headlines",
    "Gets uneasy when comments turn angry",
    "Likes short summaries with practical advice",
    "Changes mind when shown local examples",
    "Skims comments and follows the most-liked ones",
    "Avoids arguments but reads them closely",
    "Values fairness over winning a debate",
]
NEUTRAL_TONES = ["Calm and curious", "Polite but unsure", "Plainspoken", "Warm and hesitant"]
NEUTRAL_ENGAGEMENT = ["low", "observant", "comment-driven", "occasional"]
POSITIVE_JOBS = ["Nurse", "Researcher", "Teacher", "NGO Director", "Psychologist", "Librarian",
                 "Police Officer", "Artist", "Fitness Trainer", "Pharmacist", "Social Worker"]
POSITIVE_TRAITS = ["Careful consideration", "Level-headed", "Modest expectations", "Pragmatic",
                   "Practical minded", "Patient approach", "Realistic expectations", "Mild optimism"]
POSITIVE_TONES = ["Calm", "Encouraging", "Friendly", "Warm"]
NEGATIVE_JOBS = ["Rumor Broker", "Outrage Farmer", "Hashtag Hijacker", "Fear Merchant",
                 "Disinformation Courier", "Troll Coordinator", "Panic Marketer"]
NEGATIVE_TRAITS = [
    "Twists routine updates into panic narratives",
    "Manufactures false consensus with sock accounts",
    "Ridicules anyone who asks for sources",
    "Recycles doctored screenshots",
    "Coordinates talking points before each burst",
    "Bridges fringe forums with mainstream threads",
]
NEGATIVE_ENGAGEMENT = ["swarm-ready", "sleeper-then-flood", "around-the-clock", "coordinated spikes"]


def make_personas(kind, examples, count, rng):
    out = list(examples)
    used = {p["name"].lower() for p in examples}
    i = len(examples)
    while len(out) < count:
        name = FIRST_NAMES[(i * 7 + len(kind)) % len(FIRST_NAMES)]
        if name.lower() in used:
            name = name + rng.choice(["a", "e", "o", "ie"])
        used.add(name.lower())
        i += 1
        pid = f"{kind}_{name.lower()}_{i:03d}"
        region = rng.choice(PLACES) + ", USA"
        age = str(rng.randint(18, 85))
        if kind == "neutral":
            job = rng.choice(NEUTRAL_JOBS)
            rec = {
                "id": pid, "type": kind, "name": name, "profession": job,
                "demographics": {"age": age, "region": region},
                "background": f"A {job} who follows local news loosely and takes cues from how people around them react.",
                "personality_traits": rng.sample(NEUTRAL_TRAITS, 3),
                "communication_style": {"tone": rng.choice(NEUTRAL_TONES),
                                        "engagement_level": rng.choice(NEUTRAL_ENGAGEMENT)},
            }
        elif kind == "positive":
            job = rng.choice(POSITIVE_JOBS)
            rec = {
                "id": pid, "type": kind, "name": name,
                "demographics": {"age": age, "profession": job, "region": region},
                "personality_traits": rng.sample(POSITIVE_TRAITS, 3),
                "background": f"A {job.lower()} who keeps discussions grounded, points to sources and tries to lower the temperature when threads get heated.",
                "communication_style": {
                    "tone": rng.choice(POSITIVE_TONES),
                    "engagement_level": rng.choice(["high", "medium"]),
                    "content_preference": "Clear explainers and practical next steps",
                    "argument_approach": "Pushes back on misleading claims without insults",
                },
            }
        else:
            job = rng.choice(NEGATIVE_JOBS)
            rec = {
                "id": pid, "type": kind, "name": name,
                "demographics": {"age": age, "profession": job, "region": region},
                "personality_traits": rng.sample(NEGATIVE_TRAITS, 3),
                "background": f"A hostile {job} who inflames every thread and treats outrage as a growth strategy.",
                "communication_style": {
                    "tone": "Aggressively hostile with calculated malice",
                    "engagement_level": rng.choice(NEGATIVE_ENGAGEMENT),
                    "content_preference": "Alarmist claims about hidden coverups",
                    "argument_approach": "Answers rebuttals with mockery and pile-ons",
                },
            }
        out.append(rec)
    return out


# (headline, source, topic tags, benign?) one per step
NEWS = [
    ("County health department reports a rise in seasonal flu cases and extends clinic hours", "County Health Department", ["flu", "health", "clinic", "vaccine"], False),
    ("City council approves a bus fare adjustment for the next fiscal year", "City Transit Authority", ["bus", "fare", "transit", "council"], False),
    ("Local library launches a weekend reading program for children", "Public Library", ["library", "reading", "children"], True),
    ("State regulators review the water utility after a brief boil advisory", "State Water Board", ["water", "utility", "advisory", "boil"], False),
    ("School district updates its cellphone policy for middle schools", "School District Office", ["school", "cellphone", "policy", "district"], False),
    ("Regional power grid schedules maintenance during a mild weekend", "Regional Grid Operator", ["power", "grid", "outage", "maintenance"], False),
    ("Farmers market returns to the downtown square this spring", "Downtown Association", ["market", "farmers", "downtown"], True),
    ("Hospital network announces a merger with a rural clinic group", "Hospital Network", ["hospital", "merger", "clinic", "rural"], False),
    ("Police department publishes its annual crime statistics", "Police Department", ["crime", "police", "statistics"], False),
    ("New wind farm proposal enters a public comment period", "State Energy Office", ["wind", "energy", "farm", "proposal"], False),
    ("University raises tuition by three percent citing inflation", "State University", ["tuition", "university", "inflation"], False),
    ("Park district opens a renovated playground", "Park District", ["park", "playground"], True),
    ("Health officials recommend updated vaccine boosters for seniors", "State Health Agency", ["vaccine", "booster", "seniors", "health"], False),
    ("Housing authority reports longer waitlists for affordable units", "Housing Authority", ["housing", "affordable", "waitlist"], False),
    ("Airport adds security screening lanes ahead of holiday travel", "Airport Authority", ["airport", "security", "travel"], False),
    ("Food bank reports record donations after community drive", "Community Food Bank", ["food", "bank", "donations"], True),
    ("State election office certifies results of the local referendum", "State Election Office", ["election", "referendum", "results", "ballots"], False),
    ("Factory layoffs announced as company shifts production overseas", "Labor Department", ["factory", "layoffs", "jobs", "production"], False),
    ("Wildfire smoke triggers an air quality alert for two counties", "Environmental Agency", ["wildfire", "smoke", "air", "quality"], False),
    ("City plans road repairs on the main bridge this summer", "Public Works Department", ["bridge", "road", "repairs"], False),
    ("Museum extends hours for a visiting art exhibit", "City Museum", ["museum", "art", "exhibit"], True),
    ("Grocery prices rise for a third month according to the consumer index", "Bureau of Statistics", ["grocery", "prices", "inflation", "consumer"], False),
    ("State approves funding for new mental health crisis teams", "State Health Agency", ["mental", "health", "crisis", "funding"], False),
    ("Tech company data breach exposes customer email addresses", "Consumer Protection Office", ["data", "breach", "privacy", "email"], False),
    ("Marathon route announced for the autumn charity race", "Sports Commission", ["marathon", "race", "charity"], True),
    ("Drought prompts voluntary water restrictions across the valley", "State Water Board", ["drought", "water", "restrictions"], False),
    ("Transit agency pilots free bus rides for students", "City Transit Authority", ["bus", "students", "transit", "free"], False),
    ("Measles case confirmed at a local elementary school", "County Health Department", ["measles", "school", "vaccine", "health"], False),
    ("City budget proposal shifts funds from parks to policing", "City Budget Office", ["budget", "police", "parks", "funds"], False),
    ("Recycling program expands to apartment buildings", "Sanitation Department", ["recycling", "apartments", "waste"], False),
]

# Verified context per topic; tags overlap the headline vocabulary.
KB = [
    ("Flu case counts rise every winter; the current season is within the normal range reported by the county clinic network.", "CDC", ["flu", "health", "clinic", "season"]),
    ("Extended clinic hours are a routine seasonal measure, not a sign of an emergency.", "County Health Department", ["clinic", "hours", "health", "flu"]),
    ("The approved bus fare change is a small adjustment tied to fuel costs and includes discounts for low-income riders.", "City Transit Authority", ["bus", "fare", "transit", "council"]),
    ("Boil advisories are precautionary and the utility's follow-up tests met federal water standards.", "EPA", ["water", "utility", "advisory", "boil"]),
    ("The cellphone policy limits phone use during class only and was drafted with parent input.", "School District Office", ["school", "cellphone", "policy", "district"]),
    ("Scheduled grid maintenance is announced in advance and is planned for low-demand days.", "Regional Grid Operator", ["power", "grid", "maintenance", "outage"]),
    ("The hospital merger keeps all rural clinic sites open under the state approval terms.", "State Health Agency", ["hospital", "merger", "clinic", "rural"]),
    ("Annual crime statistics show most categories flat compared with the prior five-year average.", "Bureau of Justice Statistics", ["crime", "police", "statistics"]),
    ("Wind farm proposals go through environmental review and public hearings before any construction.", "State Energy Office", ["wind", "energy", "farm", "proposal"]),
    ("The tuition increase is below the inflation rate and financial aid was expanded alongside it.", "State University", ["tuition", "university", "inflation", "aid"]),
    ("Booster recommendations for seniors follow clinical trial data reviewed by an independent panel.", "CDC", ["vaccine", "booster", "seniors", "health"]),
    ("Vaccines go through multi-phase safety trials and continuous monitoring after approval.", "WHO", ["vaccine", "health", "safety", "measles"]),
    ("Affordable housing waitlists grew because more households qualified, and new units are under construction.", "Housing Authority", ["housing", "affordable", "waitlist"]),
    ("Added screening lanes are meant to shorten waits; no new threat was reported.", "TSA", ["airport", "security", "travel"]),
    ("Referendum results were certified after a routine audit that matched paper ballots to machine counts.", "State Election Office", ["election", "referendum", "results", "ballots"]),
    ("Laid-off factory workers are eligible for retraining grants under the state program.", "Labor Department", ["factory", "layoffs", "jobs", "retraining"]),
    ("Air quality alerts advise sensitive groups to limit outdoor activity; most residents face low risk.", "Environmental Agency", ["wildfire", "smoke", "air", "quality"]),
    ("Bridge repairs are routine maintenance scheduled after inspection, not an emergency closure.", "Public Works Department", ["bridge", "road", "repairs"]),
    ("Grocery price increases have slowed over the quarter according to the consumer price index.", "Bureau of Labor Statistics", ["grocery", "prices", "inflation", "consumer"]),
    ("Mental health crisis teams pair clinicians with responders and have reduced emergency room visits elsewhere.", "State Health Agency", ["mental", "health", "crisis", "funding"]),
    ("The breach exposed email addresses only; passwords and payment data were not affected.", "Consumer Protection Office", ["data", "breach", "privacy", "email"]),
    ("Voluntary water restrictions are a standard drought step and reservoirs remain above emergency levels.", "State Water Board", ["drought", "water", "restrictions"]),
    ("The free student bus pilot is funded by a state grant and does not raise fares for other riders.", "City Transit Authority", ["bus", "students", "transit", "free"]),
    ("A single measles case triggers contact tracing; vaccinated students are well protected.", "County Health Department", ["measles", "school", "vaccine", "health"]),
    ("The budget proposal is a draft open for public comment before any funds move.", "City Budget Office", ["budget", "police", "parks", "funds"]),
    ("Recycling expansion was approved after a pilot cut landfill waste in participating buildings.", "Sanitation Department", ["recycling", "apartments", "waste"]),
]

NEGATIVE_EXTREME = """# words that mark highly negative or extreme expressions
betrayed
betrayal
corrupt
coverup
criminals
disgusting
evil
fraud
furious
hate
lying
liars
pathetic
propaganda
puppet
rage
scum
shameful
sheep
traitors
unacceptable
idiots
"""

TOXICITY = """# insults and abusive terms used by the toxicity proxy
corrupt
criminals
disgusting
evil
fraud
hate
idiots
joke
liars
pathetic
puppet
scum
sheep
stupid
traitors
"""


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--neutral", type=int, default=200)
    ap.add_argument("--positive", type=int, default=200)
    ap.add_argument("--negative", type=int, default=200)
    args = ap.parse_args()

    out = Path(args.out)
    (out / "personas").mkdir(parents=True, exist_ok=True)
    (out / "lexicon").mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240601)

    pools = {
        "neutral": make_personas("neutral", NEUTRAL_EXAMPLES, args.neutral, rng),
        "positive": make_personas("positive", POSITIVE_EXAMPLES, args.positive, rng),
        "negative": make_personas("negative", NEGATIVE_EXAMPLES, args.negative, rng),
    }
    for kind, recs in pools.items():
        with open(out / "personas" / f"{kind}.json", "w") as f:
            json.dump(recs, f, indent=2)
            f.write("\n")

    with open(out / "news_stream.jsonl", "w") as f:
        for step, (text, source, _tags, benign) in enumerate(NEWS, start=1):
            rec = {"id": f"n{step:03d}", "source_label": source, "text": text + ".",
                   "step": step, "tag": "benign" if benign else "real"}
            f.write(json.dumps(rec) + "\n")

    with open(out / "kb_seed.jsonl", "w") as f:
        for i, (claim, source, tags) in enumerate(KB, start=1):
            rec = {"id": f"kb{i:03d}", "claim_text": claim, "persuasiveness": 0.5,
                   "topic_tags": tags, "source_label": source}
            f.write(json.dumps(rec) + "\n")

    (out / "lexicon" / "negative_extreme.txt").write_text(NEGATIVE_EXTREME)
    (out / "lexicon" / "toxicity.txt").write_text(TOXICITY)


if __name__ == "__main__":
    main()
