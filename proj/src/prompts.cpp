#include "guiforge/prompts.hpp"

#include <algorithm>
#include <cctype>

#include "guiforge/environment.hpp"
#include "guiforge/error.hpp"

namespace guiforge {
namespace prompts {

namespace {

const std::string kAssociationMobile = R"PROMPT(You are an expert at envisioning specific tasks corresponding to changes in mobile screenshots. I will provide you with the following:
1. The type of action currently being executed. The type of action currently being executed, which can be one of five types: CLICK, SCROLL, TYPE, PRESS_BACK, and LONG_PRESS. If the action is TYPE, an additional value representing the input will be provided. If the action is SCROLL, an additional scroll direction will be provided.
2. Screenshots of the interface before and after the current action is performed. If the action is CLICK, the pre-action screenshot will include a red bbox highlighting the element being interacted with (if applicable). Pay particular attention to the content of the element corresponding to the red bbox.
3. The name of the app where the current screenshot is located.

Your task is to envision a specific task based on the current action and the corresponding changes in screenshots. The output should include three parts:
1. Sub-Instruction: Based on the interface change caused by the current action, generate a corresponding natural language instruction for the current action. The instruction should be concise, clear, and executable. It must include specific details critical to the operation, such as file names, times, or other content as they appear in the screenshots. For example: "Scroll left to open the app drawer, displaying all installed applications on the devic", "Click the chat interface, allowing the user to view and participate in conversation", "Type the username 'Agent', preparing for the next step in logging into the account".
2. Analysis: Based on the interface changes and the current action instructions, analyze the possible subsequent operations. This analysis should involve step-by-step reasoning, considering the potential changes on the screen and the actions that can be taken after these changes. For example: "After clicking the plus button, a dropdown menu appears with an option to create a document. I can select this option to create a new document. First, I need to name the document, then enter any content into the document, and finally save the document and exit".
3. High-Level-Instruction: Based on the analysis results, envision a high-level task that can be completed within the current interface. There are two types of High-Level-Instruction:
Task-Oriented: Completing a series of operations to achieve a specific goal.
Question-Oriented: Performing a series of operations and deriving an answer to a specific question.
For example: {examples}.
Ensure that the High-Level-Instruction is executable by including all critical specifics, such as file names, relevant timings, or required details.

You ONLY need to return a dictionary formatted as follows:
{
  "Sub-Instruction": "xxx",
  "Analysis": "xxx",
  "High-Level-Instruction": "xxx"
}

Current Action: {current_action}
App Name: {app_name}
RETURN ME THE DICTIONARY I ASKED FOR.)PROMPT";

const std::string kAssociationWeb = R"PROMPT(You are a GUI (Graphical User Interface) expert capable of analyzing interface changes and envisioning executable tasks or instructions. Given a GUI interface change caused by an action (e.g., clicking or typing) and the corresponding element highlighted in red boxes, you are required to analyze the interface and generate related tasks.
Your task is to envision tasks based on the current action and the resulting changes in the screenshots. The output should include three components:
1. Sub-Instruction: Create a natural language instruction for the current action based on the interface changes it caused. The instruction should be concise, clear, and actionable, incorporating specific details critical to the task, such as elements, file names, timestamps, or other relevant content visible in the screenshots. For example:
   - "Click on the 'Add to Cart' button next to the product to add it to your shopping cart."
   - "Type 'OpenAI' into the search bar to find relevant articles."
   - "Scroll down to view the latest blog posts on the homepage."
2. Analysis: Carefully analyze the before-and-after screenshots step by step, focusing on the changes caused by the action. Then, examine key elements in both screenshots and consider possible operations based on these elements. For example: "The previous screen displayed the main interface of a shopping website, featuring multiple product categories and several showcased items. After clicking the 'Sign Up' button, the interface transitioned to a login page where an email and password can be entered to log into an account. The login page also provides other options, such as recovering a password, creating a new account, or logging in with a Google account".
3. High-Level Instruction: Based on the before-and-after screenshots, the action, and the analysis, generate a high-level task that you believe can be completed within the current interface. There are three types of tasks:
   - Information seeking: The user wants to obtain certain information from the webpage, such as product details, reviews, map information, or route comparisons. Please propose clear and specific questions that need an explicit answer, and avoid asking for summary-type questions, such as "summarize the information about a product".
   - Site navigation: The user wants to navigate to a specific page or state.
   - Content modification: The user wants to modify the content of a webpage or its settings.
The high-level instruction should be creative. You need to deeply analyze the elements and executable actions on the interface to generate realistic, valuable, and executable tasks that can be completed within the current GUI. The instruction should be specific, actionable, and goal-oriented, ensuring the task can be completed on the current GUI by including all critical specifics such as file names, relevant timings, or required details.

Below is a brief description of the current website:
{website_intro}

Here are some examples of High-Level Instruction for reference:
{task_examples}

Please generate tasks that can be completed on the current platform, and avoid tasks that are unrelated to the current website.

You ONLY need to return a dictionary formatted as follows:
{
  "Sub-Instruction": "xxx",
  "Analysis": "xxx",
  "High-Level-Instruction": "xxx"
}

Current Action: {current_action}
Website Name: {website_name}
RETURN ME THE DICTIONARY I ASKED FOR.)PROMPT";

const std::string kTrm = R"PROMPT(You are an expert in evaluating GUI agent task trajectories. Your task is to assess the quality and effectiveness of task trajectories for GUI manipulation tasks.

A trajectory consists of the following components:
1. High-level Instruction: Describes the user's intended task (e.g., "Create a new blank project name 'Orion'").
2. Action History: Includes two key parts:
   - Reasoning and Action for Each Step: A sequence of actions performed by the agent, including the reasoning thought and final executed action.
   - GUI Screenshots: Screenshots of the last state: (if there are at least three states; otherwise, include all states).

When evaluating a trajectory, consider these key aspects:

Evaluation Criteria:
1. Trajectory Coherence:
   - Do the low-level steps and corresponding actions follow a logical sequence toward the goal?
   - Are the actions clearly described and specific?
   - Are there redundant or unnecessary actions?

2. Task Completion:
   - Does the trajectory successfully achieve the instructed task?
   - Are all necessary interactions completed?
   - Are error cases handled appropriately?

Scoring Guidelines:
Rate the trajectory on a scale of 1 to 5 based on the evaluation criteria:

- 5: The task is perfectly completed, successfully executing multiple actions to achieve the goal. The sequence is logically clear with no noticeable redundancies.
- 4: The task is mostly completed, successfully executing multiple actions. However, due to challenges or ambiguities in the instructions, the completion is not perfect, or there are inefficiencies in the process.
- 3: The task is partially completed, with some successful actions executed. However, due to task or environmental constraints, the goal is not fully achieved, or the sequence ends in a loop or error.
- 2: Only a few actions are executed. Although there is an attempt to complete the task, the trajectory deviates from the goal early on or demonstrates significant inefficiencies in execution and logic.
- 1: The task fails completely, with no meaningful actions executed at the start. The sequence either falls into an immediate deadlock, a repetitive loop, or demonstrates no value in completing the task. Or the tasks are completely inaccessible.

Note: If the task is relatively complex, but the trajectory demonstrates valuable attempts, even if the task is not fully completed, consider adjusting the score upward. However, if the task is complex but the trajectory fails to perform actions that contribute meaningfully to task completion, no extra points should be awarded.

You need to judge the score based on the agent's actions and screenshots combined.

Response Format:

Format your response into two lines as shown below:

Reason: <your thoughts and reasoning process for the score>

Score: <your score from 1-5>

High-level Instruction: {high_level_instruction}
Action History:
{action_history})PROMPT";

const std::string kPlanningMobile = R"PROMPT(<image>
You are a GUI task expert, I will provide you with a high-level instruction, an action history, a screenshot with its corresponding accessibility tree.
High-level instruction: {high_level_instruction}
Action history: {action_history}
Accessibility tree: {a11y_tree}
Please generate the low-level thought and action for the next step.)PROMPT";

const std::string kActionMobile = R"PROMPT(<image>
You are a GUI task expert, I will provide you with an action history, a screenshot with its corresponding accessibility tree, and a low-level thought.
Action history: {action_history}
Accessibility tree: {a11y_tree}
Low-level thought: {low_level_thought}
Please generate the action for the next step.)PROMPT";

const std::string kWebActionList = R"PROMPT(**Available Actions**
- click [id]: This action clicks on an element with a specific id on the webpage.
- type [id] [content] [press_enter_after=0|1]: Use this to type the content into the field with id. By default, the "Enter" key is pressed after typing unless press_enter_after is set to 0.
- hover [id]: Hover over an element with id.
- press [key_comb]: Simulates the pressing of a key combination on the keyboard (e.g., Ctrl+v).
- scroll [direction=down|up]: Scroll the page up or down.
- new_tab: Open a new, empty browser tab.
- tab_focus [tab_index]: Switch the browser's focus to a specific tab using its index.
- close_tab: Close the currently active tab.
- goto [url]: Navigate to a specific URL.
- go_back: Navigate to the previously viewed page.
- go_forward: Navigate to the next page (if a previous go_back action was performed).
- stop [answer]: Issue this action when you believe the task is complete. If the objective is to find a text-based answer, provide the answer in the bracket. If you believe the task is impossible to complete, provide the answer as "N/A" in the bracket.)PROMPT";

const std::string kPlanningWeb = "<image>\n**Task Description**\nYou are an intelligent agent completing web-based tasks.\nBased on the user's objective (i.e. instruction), current interface information (i.e. screenshot and its corresponding accessibility tree), and action history, determine the next action.\n\n" + kWebActionList + R"PROMPT(

**Output Format**
First, generate the reasoning process for the action. Then, generate the action in the correct format. Start with a "In summary, the next action I will perform is" phrase, followed by action inside ```.
For example:
"Let's think step-by-step. To add a product to the shopping cart, I need to navigate to the catalog or product section. The "CATALOG" link is available with ID [1234]. In summary, the next action I will perform is ```click [1234]```".

Instruction: {instruction}
Accessibility tree: {a11y_tree}
Action History: {action_history}
What's the next action?)PROMPT";

const std::string kActionWeb =
    "<image>\nYou are an intelligent agent completing web-based tasks. I will provide you with "
    "available actions, a screenshot with its corresponding accessibility tree, and a low-level "
    "thought.\n\n" +
    kWebActionList + R"PROMPT(

Accessibility tree: {a11y_tree}
Low-level thought: {low_level_thought}
Please generate the action inside ``` for the next step.)PROMPT";

const std::string kExecutorMobile = R"PROMPT(<image>
You are a GUI task expert, I will provide you with a high-level instruction, an action history, a screenshot with its corresponding accessibility tree.

High-level instruction: {high_level_instruction}
Action history: {action_history}
Accessibility tree: {a11y_tree}

Please generate the low-level thought and action for the next step.
Candidate Actions:
"action_type": "click", "target": <node_id>
"action_type": "long_press", "target": <node_id>
"action_type": "type", "text": <text_input>, "target": <node_id>
"action_type": "scroll", "direction": <up, down, left, or right>
"action_type": "navigate_home"
"action_type": "navigate_back"
"action_type": "open_app", "app_name": <app_name>
"action_type": "wait"
"action_type": "terminate"
"action_type": "keyboard_enter"
You need to generate a script in the form:
thoughts:
{THOUGHTS}
actions:
{ACTION}
Make sure to consider the details in the screenshot and the task requirements to create an accurate and functional script.)PROMPT";

const std::string kTaskDriven = R"PROMPT(You are an expert at proposing realistic user tasks for GUI applications. I will provide you with the initial screen of {surface_name}: its accessibility tree describes every visible element.

Initial screen:
{initial_screen}

Here are some examples of tasks on this surface:
{task_examples}

Based only on this initial screen, infer possible high-level instructions a user might want to carry out here. Each instruction must be specific, actionable, and reference elements or content visible on the screen.

Return a JSON list of exactly {n} distinct high-level task instructions, nothing else.)PROMPT";

const std::string kSelfInstruct = R"PROMPT(You are an expert at proposing realistic user tasks for GUI applications. Here are 3 demonstration tasks for {surface_name}:
1. {demo_1}
2. {demo_2}
3. {demo_3}

The initial screen of {surface_name}:
{initial_screen}

Propose one new high-level task instruction in the same style as the demonstrations. It must be distinct from them, specific, actionable, and achievable on this surface.

Return a JSON list containing exactly one new high-level task instruction, nothing else.)PROMPT";

}  // namespace

const std::string& association_mobile_template() { return kAssociationMobile; }
const std::string& association_web_template() { return kAssociationWeb; }
const std::string& trm_template() { return kTrm; }
const std::string& planning_training_mobile_template() { return kPlanningMobile; }
const std::string& planning_training_web_template() { return kPlanningWeb; }
const std::string& action_training_mobile_template() { return kActionMobile; }
const std::string& action_training_web_template() { return kActionWeb; }
const std::string& executor_mobile_template() { return kExecutorMobile; }
const std::string& task_driven_template() { return kTaskDriven; }
const std::string& self_instruct_template() { return kSelfInstruct; }

std::string render(std::string_view template_text,
                   const std::map<std::string, std::string>& variables) {
    std::string out(template_text);
    for (const auto& [key, value] : variables) {
        const std::string slot = "{" + key + "}";
        if (out.find(slot) == std::string::npos)
            throw Error(Errc::missing_template_variable,
                        "template has no slot {" + key + "}");
        if (value.empty())
            throw Error(Errc::missing_template_variable, "empty value for {" + key + "}");
        std::size_t pos = 0;
        while ((pos = out.find(slot, pos)) != std::string::npos) {
            out.replace(pos, slot.size(), value);
            pos += value.size();
        }
    }
    return out;
}

std::string format_current_action(const Action& action) {
    if (action.platform == Platform::web) return canonical_action(action);
    std::string kind;
    switch (action.kind) {
        case ActionKind::navigate_back:
            kind = "PRESS_BACK";
            break;
        default:
            kind = to_string(action.kind);
            std::transform(kind.begin(), kind.end(), kind.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            break;
    }
    if (action.kind == ActionKind::type) return kind + ", input value: \"" + action.text + "\"";
    if (action.kind == ActionKind::scroll) return kind + ", direction: " + action.direction;
    return kind;
}

}  // namespace prompts
}  // namespace guiforge
