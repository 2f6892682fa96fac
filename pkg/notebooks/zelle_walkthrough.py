# coding: utf-8

# # Payment request: perception to intention
#
# An agent perceives a payment request, forms a belief about it, desires to pay
# and commits to paying. We start from the bare world state, run the three
# shipped rules and then ask the store some questions about what happened.

# In[1]:

from bdi_ontology import (answer, export, fixture_path, ingest, materialize, parse_rules,
                          parse_turtle, run, serialize_turtle, validate)
from bdi_ontology.mental import MentalGraph
from bdi_ontology.rdf import RUN
from bdi_ontology.temporal import history


def read(name):
    return fixture_path(name).read_text(encoding="utf-8")


# In[2]:

g = materialize(parse_turtle(read("zelle_input.ttl")))
print(len(g), "triples after materialization")
print(validate(g).ok)


# The rules read like `head / conditions >> actions`. Each firing becomes a
# mental process with its own IRI.

# In[3]:

rules = parse_rules(read("zelle.rules"))
kb = run(ingest(g), rules)
for event in kb.trace:
    print(event.cycle, event.rule, kb.graph.n3(event.process), event.at)


# In[4]:

out = export(kb)
print(serialize_turtle(out)[:1200])


# Questions: which desire does the new intention fulfil, and which belief
# motivated it?

# In[5]:

m = materialize(out)
print(answer("CQ7", {"intention": "run:Intention_1"}, m).to_text(m.n3))
print(answer("CQ6", {"desire": "run:Desire_1"}, m).to_text(m.n3))


# Every state has a history and an explanation tree.

# In[6]:

for entry in history(RUN.Belief_1, m):
    print(entry.at, m.n3(entry.process), entry.effect.value)

tree = MentalGraph(m).explain(RUN.Intention_1)
print(tree.render(m.n3))


# Running the same rules over the exported graph fires nothing: the firing log
# travels with the graph.

# In[7]:

again = run(ingest(out), rules)
print(len(again.trace), "new firings")


# The reference output graph answers the same questions directly.

# In[8]:

ref = materialize(parse_turtle(read("zelle.ttl")))
for cq, params in [("CQ6", {"desire": "ex:Desire_B"}), ("CQ7", {"intention": "ex:Intention_B"}),
                   ("CQ8", {"state": "ex:Belief_B"}), ("CQ10", {"process": "ex:Belief_process"})]:
    print(cq, sorted(ref.n3(v) for v in answer(cq, params, ref).values()))
