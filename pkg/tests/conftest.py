"""Shared fixtures: the ConcurrentModificationException scenario inputs."""

from __future__ import annotations

from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIOS_DIR = REPO_ROOT / "fixtures" / "scenarios"

CME_TRACE = (
    'Exception in thread "main" java.util.ConcurrentModificationException\n'
    "\tat java.util.ArrayList$Itr.checkForComodification(Unknown Source)\n"
    "\tat java.util.ArrayList$Itr.next(Unknown Source)\n"
    "\tat core.MyListManager.main(MyListManager.java:28)\n"
)

CME_CODE = """\
List<String> myList = new ArrayList<String>();
String[] items={"apple","orange","banana",
               "mango","grape"};
for(String item:items){
    myList.add(item);  }
//deleting a particular item from the list
Iterator<String> it = myList.iterator();
while(it.hasNext()){
   String value = it.next();
    if(value.equals("banana"))
     myList.remove(value);  }
"""

CAUSED_TRACE = (
    'Exception in thread "main" java.lang.RuntimeException: Failed to load user profile\n'
    "\tat app.ProfileService.loadProfile(ProfileService.java:42)\n"
    "\tat app.Main.main(Main.java:13)\n"
    "Caused by: java.lang.NullPointerException\n"
    "\tat app.UserRepository.findById(UserRepository.java:27)\n"
    "\tat app.ProfileService.loadProfile(ProfileService.java:40)\n"
    "\t... 1 more\n"
)


@pytest.fixture
def cme_trace_text() -> str:
    return CME_TRACE


@pytest.fixture
def cme_code_text() -> str:
    return CME_CODE


@pytest.fixture
def caused_trace_text() -> str:
    return CAUSED_TRACE


@pytest.fixture
def cme_trace(cme_trace_text):
    from surf.trace import parse_trace

    return parse_trace(cme_trace_text)


@pytest.fixture
def cme_code(cme_code_text):
    from surf.trace import tokenize_code

    return tokenize_code(cme_code_text)


@pytest.fixture(scope="session")
def scenarios_dir() -> Path:
    assert SCENARIOS_DIR.is_dir(), "run scripts/generate_fixtures.py first"
    return SCENARIOS_DIR


@pytest.fixture(scope="session")
def cme_scenario_dir(scenarios_dir) -> Path:
    return scenarios_dir / "cme-arraylist"


@pytest.fixture(scope="session")
def npe_scenario_dir(scenarios_dir) -> Path:
    return scenarios_dir / "npe-profile"
