"""Canned museum-case content used by the offline scripted backend.

The adaptive-architecture museum study is the reference case for tests
and demos.  Values in PUBLISHED_KEYS reproduce the source study's
responses verbatim (modulo table re-formatting into pipe tables); every
other key carries clearly synthetic fill so a full session can run to
completion offline.  SYNTHETIC_KEYS lists the invented ones.
"""

from __future__ import annotations

import re

from . import gateway as gw

ACTORS = ("Visitor", "Educator", "Administrator", "Technician")

TOPIC = (
    "The goal of this study is to generate IDEAS for using ADAPTIVE ARCHITECTURE "
    "in futuristic MUSEUMS within an exhibition room that is visited by ADULTS and "
    "CHILDREN. The adaptive architecture consists of 2 kinds of artefacts: (1) 2 "
    "large wall-mounted SCREENS on which SMART CONTENT WINDOWS move with the "
    "visitors and (2) a SMART PARTITION WALL that creates a dynamic and flexible "
    "exhibition environment by continuously analysing visitor movement, making "
    "real-time decisions, and physically reconfiguring the space to optimise the "
    "experience for everyone. The adaptive architecture artefacts represent "
    "AI-DRIVEN INTELLIGENT OBJECTS."
)

_CONTEXT = (
    "In the context of futuristic museum designs, the integration of adaptive "
    "architecture opens the door to a transformative experience for visitors. "
    "Imagine stepping into a museum where the environment dynamically responds to "
    "your presence and interests. The adaptive architecture, with its intelligent "
    "artefacts, creates an immersive journey for both adults and children. As "
    "visitors move through the space, smart content windows on large screens guide "
    "them, providing tailored information and interactive experiences. Meanwhile, "
    "the smart partition wall adjusts the layout in real-time, creating new paths "
    "and interactive zones based on visitor behaviour. This dynamic environment "
    "not only enhances learning but also fosters creativity and engagement, making "
    "each visit a unique adventure."
)

_STAKEHOLDERS = """\
1. Museum Curator: Responsible for overall museum design and visitor experience. Persona: Enthusiastic about innovative approaches but cautious about disruptions to traditional museum layouts.
2. Architect: Designs the physical layout and structure of the museum. Persona: Focused on aesthetics and functionality, interested in integrating technology seamlessly.
3. Educator: Develops educational programs and activities for museum visitors. Persona: Seeks to enhance learning outcomes through interactive experiences.
4. Technologist: Provides technical support for implementing adaptive architecture. Persona: Driven by innovation, eager to explore cutting-edge technologies.
5. Visitor: Represents the end-user experience. Persona: Seeks engaging and memorable experiences during museum visits."""

_FACTORS = (
    "1. Visitor Traffic Patterns (Nominal Scale): Description: Different patterns "
    "of visitor movement through the museum. Value Range: Low Traffic; Moderate "
    "Traffic; High Traffic.\n"
    "2. Exhibit Layout Flexibility (Ordinal Scale): Description: Degree of "
    "flexibility in rearranging exhibit layouts based on visitor movement. Value "
    "Range: Low Flexibility; Moderate Flexibility; High Flexibility.\n"
    "3. Content Personalization (Ratio Scale): Description: Level of "
    "personalization of content based on visitor interests and demographics. Value "
    "Range: Minimal Personalization; Moderate Personalization; Extensive "
    "Personalization."
)

_POTENTIAL_UML_ACTORS = (
    "1. Adult Visitor. 2. Child Visitor. 3. Museum Staff. 4. Maintenance "
    "Personnel. 5. Architectural Designer. 6. Technologist. 7. Curator. "
    "8. Educator.\n"
    "Criteria for Ranking Potential ABSS UML Actors: 1. Relevance to the study's "
    "objectives. 2. Influence on the adaptive architecture system. 3. Availability "
    "of data for accurate modeling."
)

SCOPE_TABLE = """\
| Category | Sub-Category | Explanation | Justification |
| --- | --- | --- | --- |
| Actor | Visitor | Represents individuals visiting the museum, including adults and children | Visitors are essential for simulating interactions with the museum environment and adaptive architecture |
| Actor | Educator | Represents educators responsible for developing educational programs and activities for museum visitors | Educators play a key role in designing educational experiences and guiding visitor interactions |
| Actor | Administrator | Represents the administrator responsible for the overall design and visitor experience of the museum | Administrators provide insights into the museum's vision and objectives, guiding the design of adaptive architecture |
| Actor | Technician | Represents technician providing technical support for implementing adaptive architecture in the museum | Technicians ensure the feasibility and effectiveness of integrating technology into museum exhibits and spaces |
| Physical Environment | Exhibition Spaces | Represents the physical areas within the museum where exhibits are displayed | Understanding the layout and dynamics of exhibition spaces is crucial for designing adaptive architecture |
| Physical Environment | Interactive Installations | Represents interactive installations and exhibits within the museum | Interactive installations are key components of the museum experience and need to be considered in adaptive design |
| Social Aspects | Visitor Interactions | Represents social interactions among visitors, such as group visits, conversations, and collaborative activities | Social interactions contribute to the overall museum experience and influence visitor engagement |
| Social Aspects | Learning Communities | Represents communities of learners engaging in educational activities and programs within the museum | Learning communities foster engagement and knowledge sharing among visitors, enhancing learning outcomes |
| Psychological Aspects | Engagement Levels | Represents the varying levels of engagement exhibited by visitors, ranging from passive observation to active exploration | Understanding engagement levels helps tailor experiences to visitor preferences and interests |
| Psychological Aspects | Emotional Responses | Represents the emotional responses of visitors to exhibits and interactive elements within the museum | Emotional responses influence visitor satisfaction and memory retention, impacting the effectiveness of museum experiences |
| Misc | Time | Represents the time spent by visitors in different areas of the museum | Time is a crucial factor in understanding visitor behavior and optimizing museum layouts and experiences |
| Misc | Spatial Layout | Represents the physical arrangement and layout of exhibits, interactive elements, and pathways within the museum | Spatial layout affects visitor navigation, engagement, and overall museum experience |
| Misc | Safety | Represents emergency protocols and procedures for ensuring visitor and staff safety in case of emergencies | Safety is important in case of emergencies such as evacuations or medical incidents |
| Misc | Feedback Mechanism | Represents the use of visitor feedback collection systems | Feedback mechanism gathers insights to improve exhibits, enhancing visitor satisfaction and engagement with tailored experiences |
| Misc | Staff training | Represents training programs for educators to improve their skills and knowledge | Staff training ensures that educators have the necessary skills and knowledge to facilitate visitor learning experiences effectively |"""

USECASE_DIAGRAM = """\
graph LR
A1((Visitor))
A2((Educator))
A3((Administrator))
A4((Technician))
U1([Explore Exhibits])
U2([Follow Smart Content])
U3([Join Guided Activity])
U4([Design Learning Programme])
U5([Configure Partition Wall])
U6([Review Visitor Analytics])
U7([Maintain Screen Hardware])
U8([Calibrate Tracking Sensors])
A1 -->|walks through| U1
A1 -->|watches| U2
A1 -->|participates in| U3
A2 -->|runs| U3
A2 -->|creates| U4
A3 -->|plans| U5
A3 -->|studies| U6
A4 -->|services| U7
A4 -->|tunes| U8
U2 -->|depends on| U8
U5 -->|informed by| U6"""

CLASS_DIAGRAM = """\
classDiagram
class Visitor {
+int patienceLevel
+String interestProfile
+moveToExhibit()
+reactToContent()
}
class Educator {
+String programmeFocus
+runActivity()
}
class Administrator {
+String layoutPolicy
+approveConfiguration()
}
class Technician {
+int onCallHours
+serviceHardware()
}
class VisitorGroup {
+int groupSize
+coordinateMovement()
}
class ExhibitionSpace {
+float floorArea
+reconfigureZones()
}
class InteractiveInstallation {
+String exhibitTheme
+presentContent()
}
class SmartPartitionWall {
+String currentLayout
+analyseMovement()
+repositionSegments()
}
class ContentWindow {
+String activeContent
+trackVisitor()
}
class ArtificialLab {
+Visitor[] visitors
+Educator[] educators
+Administrator[] administrators
+Technician[] technicians
+ExhibitionSpace[] exhibitionSpaces
+InteractiveInstallation[] installations
+SmartPartitionWall[] partitionWalls
+ContentWindow[] contentWindows
+summaryStatisticsDwellTime()
+summaryStatisticsEngagement()
+summaryStatisticsThroughput()
}"""


def _state_machine(name: str, states, labels, notes) -> str:
    lines = [f"%% Name: {name}", "stateDiagram-v2", f"[*] --> {states[0]}"]
    for (src, dst), label in zip(zip(states, states[1:]), labels):
        lines.append(f"{src} --> {dst}: {label}")
    lines.append(f"{states[1]} --> {states[0]}: returns for another round")
    lines.append(f"{states[-1]} --> [*]")
    for state, note in zip(states, notes):
        lines.append(f"note left of {state} : {note}")
    return "\n".join(lines)


STATE_MACHINES = "\n\n".join([
    _state_machine("Visitor",
                   ("Arriving", "Exploring", "Engaging", "Leaving"),
                   ("enters the exhibition room",
                    "a smart content window attracts attention",
                    "interest satisfied"),
                   ("The visitor enters and orients themselves.",
                    "The visitor wanders between exhibits.",
                    "The visitor interacts with adaptive content.",
                    "The visitor heads for the exit.")),
    _state_machine("Educator",
                   ("Planning", "Presenting", "Reviewing"),
                   ("activity scheduled", "session finished"),
                   ("The educator prepares a guided activity.",
                    "The educator runs the activity on the content windows.",
                    "The educator reviews engagement feedback.")),
    _state_machine("Administrator",
                   ("Monitoring", "Deciding", "Adjusting"),
                   ("analytics show congestion", "new layout chosen"),
                   ("The administrator watches live analytics.",
                    "The administrator weighs layout options.",
                    "The administrator applies a partition configuration.")),
    _state_machine("Technician",
                   ("Standby", "Diagnosing", "Repairing"),
                   ("fault reported", "cause identified"),
                   ("The technician waits for service requests.",
                    "The technician inspects sensors and screens.",
                    "The technician restores normal operation.")),
])

SEQUENCE_DIAGRAM = """\
sequenceDiagram
actor The Visitor
actor The Educator
actor The Administrator
actor The Technician
participant The Partition Wall
participant The Content Window
Note over The Visitor: Explore Exhibits
The Visitor->>The Content Window: approaches a screen
activate The Content Window
The Content Window->>The Visitor: moves content alongside
deactivate The Content Window
Note over The Educator: Design Learning Programme
The Educator->>The Content Window: uploads an activity
activate The Content Window
The Content Window->>The Educator: confirms schedule
deactivate The Content Window
Note over The Administrator: Configure Partition Wall
The Administrator->>The Partition Wall: sets layout policy
activate The Partition Wall
The Partition Wall->>The Administrator: reports new configuration
deactivate The Partition Wall
Note over The Technician: Calibrate Tracking Sensors
The Technician->>The Partition Wall: runs calibration routine
activate The Partition Wall
The Partition Wall->>The Technician: returns sensor status
deactivate The Partition Wall"""

_USE_CASE_TABLE = """\
| UML User Story | UML Use Case |
| --- | --- |
| As a Visitor I want to explore exhibits so that I discover new ideas | Explore Exhibits |
| As a Visitor I want content to follow me so that I never lose context | Follow Smart Content |
| As an Educator I want to run guided activities so that groups learn together | Join Guided Activity |
| As an Educator I want to design programmes so that content fits the audience | Design Learning Programme |
| As an Administrator I want to configure the partition wall so that flow improves | Configure Partition Wall |
| As an Administrator I want to review analytics so that decisions are evidence-based | Review Visitor Analytics |
| As a Technician I want to maintain the screens so that content stays available | Maintain Screen Hardware |
| As a Technician I want to calibrate the sensors so that tracking stays accurate | Calibrate Tracking Sensors |"""

_CATEGORISATION_SCHEMATA = """\
| Actor Category | Individual Characteristic | Scale | Value Range |
| --- | --- | --- | --- |
| Visitor | Preferred content theme | Nominal | Art; Science; History |
| Visitor | Curiosity level | Ordinal | Low; Medium; High |
| Visitor | Average dwell time | Ratio | 0-120 minutes |
| Educator | Teaching style | Nominal | Narrative; Hands-on; Socratic |
| Educator | Group-handling confidence | Ordinal | Novice; Competent; Expert |
| Educator | Sessions run per week | Ratio | 0-20 sessions |
| Administrator | Planning focus | Nominal | Safety; Revenue; Experience |
| Administrator | Risk appetite | Ordinal | Cautious; Balanced; Bold |
| Administrator | Layout changes per day | Ratio | 0-12 changes |
| Technician | Speciality | Nominal | Screens; Sensors; Partition drives |
| Technician | Certification level | Ordinal | Basic; Advanced; Master |
| Technician | Mean repair time | Ratio | 0-240 minutes |"""

_STATE_VARIABLES_TABLE = """\
| State Machine Diagram | Variable | Unit | Definition Of Variable |
| --- | --- | --- | --- |
| State machine Visitor | engagement level | scale 1-10 | represents how absorbed the visitor currently is |
| State machine Visitor | fatigue level | scale 1-10 | represents accumulated tiredness during the visit |
| State machine Educator | session load | sessions | number of activities currently scheduled |
| State machine Administrator | congestion index | percent | share of zones above comfortable density |
| State machine Technician | open fault count | faults | number of unresolved service requests |"""

_STATE_TRANSITIONS_TABLE = """\
| Actor | Start State | End State | Type Of Transition | Detail |
| --- | --- | --- | --- | --- |
| Visitor | Arriving | Exploring | condition | The visitor starts exploring once oriented in the room |
| Visitor | Exploring | Engaging | condition | A nearby content window matches the visitor's interest profile |
| Visitor | Engaging | Exploring | timeout | Attention fades after a period of interaction |
| Visitor | Exploring | Leaving | condition | The visitor decides the visit is complete |
| Educator | Planning | Presenting | timeout | The scheduled activity start time is reached |
| Educator | Presenting | Reviewing | condition | The activity session has finished |
| Administrator | Monitoring | Deciding | condition | Analytics report congestion above threshold |
| Administrator | Deciding | Adjusting | rate | Layout decisions are taken at a limited rate |
| Technician | Standby | Diagnosing | condition | A fault report arrives |
| Technician | Diagnosing | Repairing | condition | The root cause has been identified |"""

_IMPLEMENTATION_MODELS = """\
| Model Type | Model | Description | Reference |
| --- | --- | --- | --- |
| Social | Social impact theory | Explains how group presence changes individual museum behaviour | Latane, B. (1981). The psychology of social impact. American Psychologist, 36(4), pp.343-356. |
| Behavioural | Theory of planned behaviour | Links visitor intentions to observable exhibition choices | Ajzen, I. (1991). The theory of planned behavior. Organizational Behavior and Human Decision Processes, 50(2), pp.179-211. |
| Psychological | Flow theory | Describes the engagement state adaptive content aims to sustain | Csikszentmihalyi, M. (1990). Flow: The Psychology of Optimal Experience. Harper and Row. |
| Technical | Multi-agent reinforcement learning | Drives the partition wall's real-time reconfiguration decisions | Busoniu, L., Babuska, R. and De Schutter, B. (2008). A comprehensive survey of multiagent reinforcement learning. IEEE Transactions on Systems, Man, and Cybernetics, 38(2), pp.156-172. |"""

_CONCLUSION = (
    "This study set out to generate ideas for using adaptive architecture in "
    "futuristic museums, and the resulting conceptual model shows that the aim has "
    "been achieved. The model captures four actors, a structured scope of fifteen "
    "real-world elements, and the intelligent artefacts that reconfigure the "
    "exhibition room, giving stakeholders a shared picture of how smart content "
    "windows and the partition wall shape the visitor experience.\n\n"
    "The objectives concerning engagement and spatial efficiency are answerable "
    "through the defined outputs: dwell time and engagement statistics collected "
    "by the artificial lab directly measure whether adaptive reconfiguration "
    "improves the visit, while the congestion index speaks to the hypotheses "
    "about movement and comfort. The experimental factors of traffic patterns, "
    "layout flexibility and content personalization provide the levers for the "
    "simulation scenarios that will test them.\n\n"
    "Two limitations stand out: the co-created viewpoints remain stereotypical "
    "rather than grounded in observed visitor data, and the behavioural rules are "
    "specified at a coarse level that may miss fine-grained crowd effects. Based "
    "on these, two directions for future work are proposed: first, calibrate the "
    "archetype characteristics against field observations from an instrumented "
    "exhibition room; second, refine the state machines with empirically derived "
    "transition rates so the simulated museum can be validated against measured "
    "visitor flows."
)

# Published content (reproduced from the source study's responses).
PUBLISHED_KEYS = {
    "key-role1": "Sociologist with experience in Agent-Based Social Simulation.",
    "key-topic": TOPIC,
    "key-researchDesign": "Exploratory.",
    "key-domain": "Social Studies.",
    "key-specialisation": "Human Behaviour.",
    "key-context": _CONTEXT,
    "key-stakeholders": _STAKEHOLDERS,
    "key-keywords": ("Adaptive architecture, Futuristic museums, Smart content "
                     "windows, AI-driven objects, Visitor experience."),
    "key-title": ('"Adaptive Architecture: Transforming Future Museums with '
                  'Intelligent Environments".'),
    "key-aim": ("The aim of this study is to explore the integration of adaptive "
                "architecture into futuristic museums to enhance visitor "
                "experience and educational value. By investigating the potential "
                "of smart content windows and AI-driven objects, the study seeks "
                "to create dynamic and engaging environments that cater to "
                "diverse audiences."),
    "key-experimentalFactors": _FACTORS,
    "key-potentialUMLActors": _POTENTIAL_UML_ACTORS,
    "key-explanations": SCOPE_TABLE,
    "key-modelScope": SCOPE_TABLE,
}

# Synthetic fill for responses the source study does not publish.
SYNTHETIC_KEYS = {
    "key-role2": 'Senior Software Developer with experience in the Unified Modelling Language.',
    "key-role3": "Marketing Expert with experience in Customer Management.",
    "key-role4": 'Senior Software Developer with experience in the Unified Modelling Language.',
    "key-potentialAims": ("1. Explore how adaptive architecture reshapes visitor "
                          "engagement. 2. Assess how intelligent artefacts support "
                          "learning for mixed audiences."),
    "key-potentialObjectives": ("1. Maximise visitor engagement. 2. Balance crowd "
                                "flow. 3. Support educators' programmes. "
                                "4. Reduce maintenance downtime."),
    "key-objectives": ("1. Maximise visitor engagement with adaptive exhibits. "
                       "Performance measures: average engagement level; share of "
                       "visitors interacting with smart content.\n"
                       "2. Improve spatial efficiency of the exhibition room. "
                       "Performance measures: congestion index; average walking "
                       "distance per visit."),
    "key-potentialHypotheses": ("1. Moving content windows lengthen dwell time. "
                                "2. Partition reconfiguration reduces congestion. "
                                "3. Children engage longer with interactive zones. "
                                "4. Personalised content raises satisfaction."),
    "key-hypotheses": ("1. Real-time partition reconfiguration reduces peak "
                       "congestion. Performance measures: congestion index; "
                       "evacuation margin.\n"
                       "2. Smart content windows increase time spent per exhibit. "
                       "Performance measures: average dwell time; repeat "
                       "interaction rate."),
    "key-potentialExperimentalFactors": ("1. Visitor traffic patterns. 2. Exhibit "
                                         "layout flexibility. 3. Content "
                                         "personalization. 4. Opening-hours "
                                         "policy. 5. Group-visit ratio. "
                                         "6. Sensor accuracy."),
    "key-potentialOutputs": ("1. Average dwell time. 2. Engagement level "
                             "distribution. 3. Congestion index over time. "
                             "4. Educator session completion rate. 5. Fault "
                             "response time. 6. Visitor satisfaction score."),
    "key-outputs": ("1. Average dwell time per visitor: measures whether the "
                    "engagement objective is satisfied.\n"
                    "2. Congestion index time series: accepts or rejects the "
                    "reconfiguration hypothesis.\n"
                    "3. Engagement level distribution: links both objectives to "
                    "the content-window hypothesis."),
    "key-umlActors": ("1. Visitor: an adult or child exploring the exhibition "
                      "room. 2. Educator: designs and runs learning activities. "
                      "3. Administrator: owns the layout policy and visitor "
                      "experience. 4. Technician: keeps screens, sensors and the "
                      "partition wall operational."),
    "key-implementationModels": _IMPLEMENTATION_MODELS,
    "key-umlUserStories": ("Eight user stories, two per actor, covering exploring, "
                           "following content, guiding, programme design, layout "
                           "configuration, analytics review, hardware maintenance "
                           "and sensor calibration."),
    "key-umlUseCases": ("1. Explore Exhibits. 2. Follow Smart Content. 3. Join "
                        "Guided Activity. 4. Design Learning Programme. "
                        "5. Configure Partition Wall. 6. Review Visitor "
                        "Analytics. 7. Maintain Screen Hardware. 8. Calibrate "
                        "Tracking Sensors."),
    "key-umlUseCaseTable": _USE_CASE_TABLE,
    "key-mermaidKeyActivitiesScriptDraft": USECASE_DIAGRAM,
    "key-mermaidKeyActivitiesScript": USECASE_DIAGRAM,
    "key-potentialArchetypes": ("Two potential archetypes per actor, for example "
                                "the focused researcher and the playful browser "
                                "for visitors, identified through behaviour, "
                                "preferences and likelihood of actions."),
    "key-categorisationSchemata": _CATEGORISATION_SCHEMATA,
    "key-mermaidClassDiagramScriptDraft": CLASS_DIAGRAM,
    "key-mermaidClassDiagramScript": CLASS_DIAGRAM,
    "key-mermaidStateMachineDiagramsScriptDraft": STATE_MACHINES,
    "key-mermaidStateMachineDiagramsScript": STATE_MACHINES,
    "key-stateVariablesTable": _STATE_VARIABLES_TABLE,
    "key-stateTransitionsTable": _STATE_TRANSITIONS_TABLE,
    "key-mermaidSequenceDiagramScriptDraft": SEQUENCE_DIAGRAM,
    "key-mermaidSequenceDiagramScript": SEQUENCE_DIAGRAM,
    "key-conclusion": _CONCLUSION,
}

CONTENT = {**PUBLISHED_KEYS, **SYNTHETIC_KEYS}

_MEMORISE_KEY_RE = re.compile(r"Memorise[^|{]*?\{(key-[A-Za-z0-9_-]+)\}")
_LIST_KEY_RE = re.compile(r"^List the memorised (key-[A-Za-z0-9_-]+)\.$")
_HEADING_RE = re.compile(r'Display MD "([^"]+)"')


def _label(key: str) -> str:
    words = re.sub(r"([a-z0-9])([A-Z])", r"\1 \2", key[len("key-"):])
    return words.replace("-", " ").replace("_", " ").title()


def museum_rules(prompt: str, request: gw.ChatRequest):
    """Scripted-backend rules for the museum case: deterministic replies
    shaped like the real responses (labelled memorised-key blocks)."""
    m = _LIST_KEY_RE.match(prompt.strip())
    if m:
        key = m.group(1)
        value = CONTENT.get(key, f"(no memorised content for {key})")
        return f"Memorised {_label(key)} {{{key}}}: {value}"

    keys = []
    for key in _MEMORISE_KEY_RE.findall(prompt):
        if key not in keys:
            keys.append(key)
    if not keys:
        return None  # fall through to the generic acknowledgement

    parts = []
    heading = _HEADING_RE.search(prompt)
    if heading:
        parts.append(f"### {heading.group(1)}")
    for key in keys:
        value = CONTENT.get(key, f"Synthetic content for {_label(key)}.")
        parts.append(f"Memorised {_label(key)} {{{key}}}: {value}")
    return "\n\n".join(parts)


def scripted_backend() -> gw.ScriptedBackend:
    return gw.ScriptedBackend(museum_rules)
