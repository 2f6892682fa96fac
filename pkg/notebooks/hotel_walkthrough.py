# coding: utf-8

# # Hotel check-in: a contradicted plan step
#
# The agent believes it is at home, but the plan it is following starts with a
# check-in task that needs it to be at the hotel. The rule set notices the
# mismatch, commits to a different task and records why.

# In[1]:

from bdi_ontology import (BDI, Timemap, answer, export, fixture_path, ingest, materialize,
                          parse_rules, parse_turtle, run, validate)
from bdi_ontology.rdf import RDFS, RUN
from bdi_ontology.temporal import TimeInstant, states_valid_at


def read(name):
    return fixture_path(name).read_text(encoding="utf-8")


# In[2]:

g = materialize(parse_turtle(read("hotel_input.ttl")))
report = validate(g)
print(len(report.errors), "errors,", len(report.warnings), "warnings")
for item in report.warnings[:5]:
    print(" ", item.code, g.n3(item.subject), item.message)


# Unknown predicates such as `bdi:hasLocation` only produce warnings, so the
# rules can still use them.

# In[3]:

kb = run(ingest(g), parse_rules(read("hotel.rules")))
for event in kb.trace:
    print(event.cycle, event.rule, kb.graph.n3(event.process))
print("bound reached:", kb.bound_reached)


# In[4]:

out = materialize(export(kb))
(j,) = out.subjects(BDI.justifies, RUN.Intention_1)
print(out.objects(j, RDFS.comment)[0].lexical)


# The new plan addresses a different goal and contains the task that fits
# the current location.

# In[5]:

print(answer("CQ11", {"entity": "run:Intention_1"}, out).to_text(out.n3))
print(answer("CQ13", {"intention": "run:Intention_1"}, out).to_text(out.n3))
print(answer("CQ5", {"state": "run:Intention_1"}, out).to_text(out.n3))
print(answer("CQ15", {"plan": "run:Plan_1"}, out).to_text(out.n3))


# ## Time
#
# The reference graph names its times symbolically ("weekend morning"). A
# timemap gives them concrete instants so validity questions can be answered.

# In[6]:

ref = Timemap.load(str(fixture_path("timemap.toml"))).augment(parse_turtle(read("hotel.ttl")))
ref = materialize(ref)
for when in ["2025-10-25T07:00:00Z", "2025-10-25T09:00:00Z", "2025-10-25T13:00:00Z"]:
    states = states_valid_at(None, TimeInstant.parse(when), ref)
    print(when, sorted(ref.n3(s) for s in states))


# In[7]:

print(answer("CQ16", {"state": "ex:Belief_B1"}, ref).to_text(ref.n3))
print(answer("CQ17", {"instant": "2025-10-25T09:00:00Z", "agent": "ex:Agent_A1"}, ref).to_csv(ref.n3))
